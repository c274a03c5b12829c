#include "polylearn/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "polylearn/bayes_net.hpp"
#include "polylearn/information.hpp"
#include "polylearn/model_io.hpp"
#include "polylearn/orientation.hpp"
#include "polylearn/param_fit.hpp"
#include "polylearn/sampling.hpp"
#include "polylearn/skeleton_recovery.hpp"

namespace polylearn {
namespace {

// Seed streams under a trial seed.
constexpr std::uint64_t kInstanceStream = 0;
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kRedrawStream = 0xFFFF;
constexpr std::size_t kMaxInstanceRedraws = 20;

std::vector<TrialResult> run_cells(const LearnConfig& cfg, std::size_t trial,
                                   const std::vector<std::uint64_t>& sizes) {
  const RngSeed trial_seed = derive_seed(cfg.seed, trial);
  const DiscreteBayesNet truth = trial_instance(cfg, trial);
  const PolytreeGraph& g_star = truth.graph();
  const std::size_t n = truth.vertex_count();
  const auto joint = std::make_shared<const JointTable>(joint_distribution(truth));
  const double score_star = mi_score(*joint, g_star);
  const Skeleton true_skeleton = g_star.skeleton();

  std::vector<TrialResult> out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    TrialResult r;
    r.trial = trial;
    r.seed = trial_seed.value;
    r.n = n;
    r.d = cfg.in_degree_bound;
    r.d_star = g_star.max_in_degree();
    r.mode = cfg.mode;

    OrientationConfig ocfg;
    ocfg.in_degree_bound = cfg.in_degree_bound;
    std::optional<Dataset> data;
    Skeleton skeleton = true_skeleton;
    if (cfg.mode == TesterMode::oracle) {
      r.m = 0;
      ocfg.tester = oracle_tester(*joint, cfg.effective_test_epsilon(), cfg.tester_constant);
      if (cfg.skeleton == SkeletonSource::chow_liu) skeleton = chow_liu_skeleton(pairwise_mi(*joint));
    } else {
      r.m = sizes[i];
      data = forward_sample(truth, sizes[i], derive_seed(trial_seed, kSampleStream + i));
      ocfg.tester = empirical_tester(*data, cfg.effective_test_epsilon(), cfg.delta, cfg.tester_constant);
      if (cfg.skeleton == SkeletonSource::chow_liu) skeleton = chow_liu_skeleton(pairwise_mi(*data));
    }
    r.skeleton_ok = skeleton == true_skeleton;

    const OrientationResult learned = learn_orientation(skeleton, ocfg);
    r.graph_gap_bits = score_star - mi_score(*joint, learned.graph);
    const double kl_graph = kl_divergence(*joint, joint_distribution(project_onto(*joint, learned.graph)));
    if (cfg.mode == TesterMode::oracle) {
      r.kl_total_bits = kl_graph;
    } else {
      const DiscreteBayesNet fitted = fit_cpts(*data, learned.graph, SmoothingRule{cfg.kappa});
      r.kl_total_bits = kl_divergence(*joint, joint_distribution(fitted));
    }
    r.kl_param_gap_bits = r.kl_total_bits - kl_graph;
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.push_back(r);
  }
  return out;
}

std::vector<std::uint64_t> effective_sizes(const LearnConfig& cfg) {
  if (cfg.mode == TesterMode::oracle) return {0};
  return cfg.sample_sizes;
}

std::string join_sizes(const std::vector<std::uint64_t>& sizes) {
  std::string s;
  for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
  return s;
}

}  // namespace

const char* to_string(TesterMode mode) { return mode == TesterMode::oracle ? "oracle" : "empirical"; }
const char* to_string(SkeletonSource source) { return source == SkeletonSource::given ? "given" : "chow-liu"; }
const char* to_string(InstanceSource source) { return source == InstanceSource::random ? "random" : "figure1"; }

double LearnConfig::effective_test_epsilon() const {
  return test_epsilon ? *test_epsilon : per_test_epsilon(epsilon, vertex_count(), in_degree_bound);
}

void LearnConfig::validate() const {
  if (instance == InstanceSource::random) {
    InstanceSpec spec;
    spec.n = n;
    spec.in_degree_bound = in_degree_bound;
    spec.alphabet_size = alphabet_size;
    spec.concentration = concentration;
    spec.min_edge_mi = min_edge_mi;
    spec.edge_drop_probability = edge_drop_probability;
    spec.validate();
  } else if (in_degree_bound < 1) {
    throw std::invalid_argument("in-degree bound must be at least 1");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(tester_constant > 0.0 && tester_constant < 1.0)) {
    throw std::invalid_argument("tester constant must lie in (0, 1)");
  }
  if (test_epsilon && !(*test_epsilon > 0.0)) throw std::invalid_argument("test epsilon must be positive");
  if (!(kappa >= 0.0)) throw std::invalid_argument("smoothing pseudo-count must be nonnegative");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (mode == TesterMode::empirical) {
    if (sample_sizes.empty()) throw std::invalid_argument("empirical mode needs at least one sample size");
    for (auto m : sample_sizes) {
      if (m < 1) throw std::invalid_argument("sample sizes must be positive");
    }
  }
  // Exact KL needs the dense joint; refuse up front rather than per trial.
  const std::size_t k = instance == InstanceSource::figure1 ? 2 : alphabet_size;
  Alphabet::uniform(vertex_count(), k).table_size();
}

DiscreteBayesNet trial_instance(const LearnConfig& cfg, std::size_t trial) {
  const RngSeed trial_seed = derive_seed(cfg.seed, trial);
  if (cfg.instance == InstanceSource::figure1) {
    return figure1_fixture(derive_seed(trial_seed, kInstanceStream), cfg.min_edge_mi);
  }
  InstanceSpec spec;
  spec.n = cfg.n;
  spec.in_degree_bound = cfg.in_degree_bound;
  spec.alphabet_size = cfg.alphabet_size;
  spec.concentration = cfg.concentration;
  spec.min_edge_mi = cfg.min_edge_mi;
  spec.edge_drop_probability = cfg.edge_drop_probability;
  // A graph whose CPTs cannot reach min_edge_mi is redrawn whole.
  for (std::size_t attempt = 0;; ++attempt) {
    spec.seed = attempt == 0 ? derive_seed(trial_seed, kInstanceStream)
                             : derive_seed(derive_seed(trial_seed, kRedrawStream), attempt);
    try {
      return random_polytree(spec);
    } catch (const ResamplingExhausted&) {
      if (attempt + 1 == kMaxInstanceRedraws) throw;
    }
  }
}

TrialResult run_trial(const LearnConfig& cfg, std::size_t trial, std::uint64_t m) {
  return run_cells(cfg, trial, {m}).front();
}

std::vector<TrialResult> run_learn(const LearnConfig& cfg) {
  cfg.validate();
  const auto sizes = effective_sizes(cfg);
  std::vector<std::vector<TrialResult>> cells(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < cfg.trials; t = next++) {
      try {
        cells[t] = run_cells(cfg, t, sizes);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(cfg.jobs, std::max<std::size_t>(cfg.trials, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  std::vector<TrialResult> rows;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    if (errors[t]) std::rethrow_exception(errors[t]);
    rows.insert(rows.end(), cells[t].begin(), cells[t].end());
  }
  return rows;
}

std::string preamble(const LearnConfig& cfg, const std::vector<std::string>& command_line) {
  std::ostringstream out;
  out << "# polylearn " << kLibraryVersion << "\n";
  if (!command_line.empty()) {
    out << "# command:";
    for (const auto& arg : command_line) out << ' ' << arg;
    out << "\n";
  }
  out << "# rng=" << kRngName << "\n"
      << "# seed=" << cfg.seed.value << "\n"
      << "# instance=" << to_string(cfg.instance) << "\n"
      << "# n=" << cfg.vertex_count() << "\n"
      << "# in_degree_bound=" << cfg.in_degree_bound << "\n"
      << "# alphabet_size=" << (cfg.instance == InstanceSource::figure1 ? 2 : cfg.alphabet_size) << "\n"
      << "# concentration=" << format_short(cfg.concentration) << "\n"
      << "# min_edge_mi=" << (cfg.min_edge_mi ? format_short(*cfg.min_edge_mi) : std::string("none")) << "\n"
      << "# edge_drop_probability=" << format_short(cfg.edge_drop_probability) << "\n"
      << "# epsilon=" << format_short(cfg.epsilon) << "\n"
      << "# delta=" << format_short(cfg.delta) << "\n"
      << "# tester_constant=" << format_short(cfg.tester_constant) << "\n"
      << "# test_epsilon=" << format_short(cfg.effective_test_epsilon()) << "\n"
      << "# mode=" << to_string(cfg.mode) << "\n"
      << "# skeleton=" << to_string(cfg.skeleton) << "\n"
      << "# sample_sizes=" << join_sizes(effective_sizes(cfg)) << "\n"
      << "# kappa=" << format_short(cfg.kappa) << "\n"
      << "# trials=" << cfg.trials << "\n"
      << "# jobs=" << cfg.jobs << "\n"
      << "# units=bits\n";
  return out.str();
}

std::string csv_row(const TrialResult& r, bool with_runtime) {
  std::ostringstream out;
  out << r.trial << ',' << r.seed << ',' << r.n << ',' << r.d << ',' << r.d_star << ',' << r.m << ','
      << to_string(r.mode) << ',' << (r.skeleton_ok ? 1 : 0) << ',' << format_real(r.graph_gap_bits) << ','
      << format_real(r.kl_total_bits) << ',' << format_real(r.kl_param_gap_bits) << ',';
  if (with_runtime) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.runtime_ms);
    out << buf;
  }
  return out.str();
}

void write_results(const LearnConfig& cfg, const std::vector<TrialResult>& rows, std::ostream& out,
                   const std::vector<std::string>& command_line) {
  out << preamble(cfg, command_line) << kTrialCsvHeader << "\n";
  for (const auto& r : rows) out << csv_row(r) << "\n";
}

}  // namespace polylearn
