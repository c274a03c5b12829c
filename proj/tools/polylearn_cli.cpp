// polylearn command-line harness.
//
//   polylearn learn            run learning trials, one CSV row per (trial, m)
//   polylearn certify-gadget   two-polytree gadget certificates as JSON
//   polylearn check-assumption skeleton-gap report for a model as JSON
//   polylearn gen-instance     write a random (or fixture) model, optionally samples
//   polylearn property-suite   every module invariant with fixed seeds
//
// Exit codes: 0 success, 1 check failure, 2 bad configuration.
// POLYLEARN_OUTPUT_DIR, when set, is where results go if --output is omitted.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polylearn/bayes_net.hpp"
#include "polylearn/gadgets.hpp"
#include "polylearn/information.hpp"
#include "polylearn/instance_gen.hpp"
#include "polylearn/model_io.hpp"
#include "polylearn/pipeline.hpp"
#include "polylearn/property_suite.hpp"
#include "polylearn/sampling.hpp"
#include "polylearn/skeleton_recovery.hpp"

namespace fs = std::filesystem;
using namespace polylearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "-" is stdout; empty falls back to $POLYLEARN_OUTPUT_DIR/<fallback>, then stdout.
std::optional<fs::path> resolve_output(const std::string& flag, const std::string& fallback) {
  if (flag == "-") return std::nullopt;
  if (!flag.empty()) return fs::path(flag);
  if (const char* dir = std::getenv("POLYLEARN_OUTPUT_DIR"); dir && *dir) return fs::path(dir) / fallback;
  return std::nullopt;
}

void emit(const std::optional<fs::path>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  if (path->has_parent_path()) fs::create_directories(path->parent_path());
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path->string());
  out << text;
  std::cerr << "wrote " << path->string() << "\n";
}

std::optional<double> parse_optional_real(const std::string& text, const std::string& flag) {
  if (text == "none") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(flag + " expects a number or 'none', got '" + text + "'");
  }
}

struct InstanceFlags {
  std::string instance = "random";
  std::size_t n = 8;
  std::size_t d = 3;
  std::size_t alphabet_size = 2;
  double concentration = 1.0;
  std::string min_edge_mi = "0.01";
  double edge_drop = 0.0;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--instance", instance, "random | figure1")
        ->check(CLI::IsMember({"random", "figure1"}))
        ->capture_default_str();
    app->add_option("--n", n, "number of variables")->capture_default_str();
    app->add_option("--in-degree-bound", d, "max in-degree d")->capture_default_str();
    app->add_option("--alphabet-size", alphabet_size, "symbols per variable")->capture_default_str();
    app->add_option("--concentration", concentration, "Dirichlet parameter for CPT rows")->capture_default_str();
    app->add_option("--min-edge-mi", min_edge_mi, "min exact I(u;v) per arc in bits, or none")
        ->capture_default_str();
    app->add_option("--edge-drop-probability", edge_drop, "turns the tree into a forest")->capture_default_str();
    app->add_option("--seed", seed, "master seed")->capture_default_str();
  }
};

int cmd_learn(const LearnConfig& cfg, const std::string& output, const std::vector<std::string>& argv) {
  cfg.validate();
  const auto rows = run_learn(cfg);
  std::ostringstream out;
  write_results(cfg, rows, out, argv);
  emit(resolve_output(output, "learn.csv"), out.str());

  // Short per-m summary on stderr.
  std::map<std::uint64_t, std::vector<TrialResult>> by_m;
  for (const auto& r : rows) by_m[r.m].push_back(r);
  for (auto& [m, group] : by_m) {
    std::vector<double> kl, gap;
    std::size_t skeleton_ok = 0;
    for (const auto& r : group) {
      kl.push_back(r.kl_total_bits);
      gap.push_back(r.graph_gap_bits);
      skeleton_ok += r.skeleton_ok;
    }
    std::sort(kl.begin(), kl.end());
    std::sort(gap.begin(), gap.end());
    std::cerr << "m=" << m << " trials=" << group.size() << " median_kl_bits=" << format_real(kl[kl.size() / 2])
              << " median_graph_gap_bits=" << format_real(gap[gap.size() / 2]) << " skeleton_ok=" << skeleton_ok
              << "/" << group.size() << "\n";
  }
  return kExitOk;
}

int cmd_certify(const std::vector<double>& alphas, const std::string& output) {
  if (alphas.empty()) throw ConfigError("--alpha needs at least one value");
  std::vector<GadgetReport> reports;
  for (double a : alphas) reports.push_back(certify_gadget(build_gadget(a)));
  std::ostringstream out;
  out << "{\"reports\": [";
  bool ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out << (i ? ", " : "") << to_json(reports[i]);
    ok = ok && reports[i].passed();
  }
  out << "], \"h2_ratios\": [";
  bool first = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (std::size_t j = 0; j < reports.size(); ++j) {
      if (reports[j].alpha != 2.0 * reports[i].alpha) continue;
      out << (first ? "" : ", ") << "{\"from\": " << format_real(reports[i].alpha)
          << ", \"to\": " << format_real(reports[j].alpha)
          << ", \"ratio\": " << format_real(reports[j].h2 / reports[i].h2) << "}";
      first = false;
    }
  }
  out << "], \"passed\": " << (ok ? "true" : "false") << "}\n";
  emit(resolve_output(output, "gadget.json"), out.str());
  return ok ? kExitOk : kExitCheckFailed;
}

DiscreteBayesNet make_instance(const InstanceFlags& f) {
  const auto min_mi = parse_optional_real(f.min_edge_mi, "--min-edge-mi");
  if (f.instance == "figure1") return figure1_fixture(RngSeed{f.seed}, min_mi);
  InstanceSpec spec;
  spec.n = f.n;
  spec.in_degree_bound = f.d;
  spec.alphabet_size = f.alphabet_size;
  spec.concentration = f.concentration;
  spec.min_edge_mi = min_mi;
  spec.edge_drop_probability = f.edge_drop;
  spec.seed = RngSeed{f.seed};
  spec.validate();
  Alphabet::uniform(spec.n, spec.alphabet_size).table_size();
  return random_polytree(spec);
}

int cmd_check_assumption(const std::string& model, const InstanceFlags& f, const std::string& output) {
  const DiscreteBayesNet bn = model.empty() ? make_instance(f) : load_bayes_net(model);
  const GapReport report = check_assumption(joint_distribution(bn), bn.graph());
  emit(resolve_output(output, "assumption.json"), to_json(report) + "\n");
  return report.satisfied ? kExitOk : kExitCheckFailed;
}

int cmd_gen_instance(const InstanceFlags& f, std::size_t samples, const std::string& output,
                     const std::string& data_output) {
  const DiscreteBayesNet bn = make_instance(f);
  emit(resolve_output(output, "instance.json"), to_json(bn));
  if (samples > 0) {
    const Dataset data = forward_sample(bn, samples, derive_seed(RngSeed{f.seed}, 1));
    std::ostringstream csv;
    write_csv(data, csv);
    emit(resolve_output(data_output, "samples.csv"), csv.str());
  }
  return kExitOk;
}

int cmd_property_suite(const PropertySuiteOptions& opt, const std::string& output) {
  const auto results = run_property_suite(opt);
  double total = 0.0;
  for (const auto& r : results) {
    total += r.seconds;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2fs", r.seconds);
    std::cerr << (r.passed ? "pass " : "FAIL ") << r.name << " (" << r.cases << " cases, " << secs << ")"
              << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
  }
  std::cerr << (all_passed(results) ? "all checks passed" : "some checks failed") << " in " << total << " s\n";
  const auto path = resolve_output(output, "property_suite.json");
  if (path || !output.empty()) emit(path, to_json(results));
  if (!all_passed(results)) {
    std::cerr << "failing:";
    for (const auto& r : results) {
      if (!r.passed) std::cerr << ' ' << r.name;
    }
    std::cerr << "\n";
  }
  return all_passed(results) ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"polytree learning experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kLibraryVersion));

  // learn
  auto* learn = app.add_subcommand("learn", "learn polytrees from samples (or an exact oracle)");
  InstanceFlags learn_inst;
  learn_inst.add(learn);
  LearnConfig cfg;
  std::string mode = "empirical", skeleton = "given", test_epsilon = "auto", learn_out;
  std::vector<std::uint64_t> sizes{1000};
  learn->add_option("--epsilon", cfg.epsilon, "target KL error")->capture_default_str();
  learn->add_option("--delta", cfg.delta, "failure probability")->capture_default_str();
  learn->add_option("--tester-constant", cfg.tester_constant, "threshold constant C")->capture_default_str();
  learn->add_option("--test-epsilon", test_epsilon, "per-test tolerance, or auto for eps/(2n(d+1))")
      ->capture_default_str();
  learn->add_option("--mode", mode, "oracle | empirical")
      ->check(CLI::IsMember({"oracle", "empirical"}))
      ->capture_default_str();
  learn->add_option("--skeleton", skeleton, "given | chow-liu")
      ->check(CLI::IsMember({"given", "chow-liu"}))
      ->capture_default_str();
  learn->add_option("--sample-sizes", sizes, "sample sizes m (sweep)")->delimiter(',')->capture_default_str();
  learn->add_option("--kappa", cfg.kappa, "add-kappa smoothing for CPTs")->capture_default_str();
  learn->add_option("--trials", cfg.trials, "number of trials")->capture_default_str();
  learn->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
  learn->add_option("--output", learn_out, "CSV path, - for stdout");

  // certify-gadget
  auto* certify = app.add_subcommand("certify-gadget", "certify the two-polytree gadget pair");
  std::vector<double> alphas{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::string certify_out;
  certify->add_option("--alpha", alphas, "alpha values in (0, 1/2]")->delimiter(',')->capture_default_str();
  certify->add_option("--output", certify_out, "JSON path, - for stdout");

  // check-assumption
  auto* assumption = app.add_subcommand("check-assumption", "skeleton gap of a model");
  InstanceFlags assume_inst;
  assume_inst.add(assumption);
  std::string model_path, assume_out;
  assumption->add_option("--model", model_path, "model JSON (otherwise an instance is generated)");
  assumption->add_option("--output", assume_out, "JSON path, - for stdout");

  // gen-instance
  auto* gen = app.add_subcommand("gen-instance", "write a random model");
  InstanceFlags gen_inst;
  gen_inst.add(gen);
  std::size_t gen_samples = 0;
  std::string gen_out, gen_data_out;
  gen->add_option("--samples", gen_samples, "also forward-sample this many rows")->capture_default_str();
  gen->add_option("--output", gen_out, "model JSON path, - for stdout");
  gen->add_option("--data-output", gen_data_out, "CSV path for samples, - for stdout");

  // property-suite
  auto* suite = app.add_subcommand("property-suite", "run every invariant check");
  PropertySuiteOptions suite_opt;
  std::string suite_filter, suite_out;
  suite->add_option("--seed", suite_opt.seed.value, "master seed")->capture_default_str();
  suite->add_option("--filter", suite_filter, "only checks whose name contains this");
  suite->add_flag("--inject-corrupt-cpt", suite_opt.corrupt_cpt_row, "negative control: one row sums to 0.9");
  suite->add_option("--output", suite_out, "JSON report path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*learn) {
      cfg.instance = learn_inst.instance == "figure1" ? InstanceSource::figure1 : InstanceSource::random;
      cfg.n = learn_inst.n;
      cfg.in_degree_bound = learn_inst.d;
      cfg.alphabet_size = learn_inst.alphabet_size;
      cfg.concentration = learn_inst.concentration;
      cfg.min_edge_mi = parse_optional_real(learn_inst.min_edge_mi, "--min-edge-mi");
      cfg.edge_drop_probability = learn_inst.edge_drop;
      cfg.seed = RngSeed{learn_inst.seed};
      cfg.mode = mode == "oracle" ? TesterMode::oracle : TesterMode::empirical;
      cfg.skeleton = skeleton == "given" ? SkeletonSource::given : SkeletonSource::chow_liu;
      cfg.sample_sizes = sizes;
      if (test_epsilon != "auto") cfg.test_epsilon = parse_optional_real(test_epsilon, "--test-epsilon");
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      } catch (const BudgetExceeded& e) {
        throw ConfigError(e.what());
      }
      return cmd_learn(cfg, learn_out, args);
    }
    if (*certify) {
      for (double a : alphas) {
        if (!(a > 0.0 && a <= 0.5)) throw ConfigError("--alpha values must lie in (0, 1/2]");
      }
      return cmd_certify(alphas, certify_out);
    }
    if (*assumption) return cmd_check_assumption(model_path, assume_inst, assume_out);
    if (*gen) return cmd_gen_instance(gen_inst, gen_samples, gen_out, gen_data_out);
    if (*suite) {
      if (!suite_filter.empty()) suite_opt.filter = suite_filter;
      return cmd_property_suite(suite_opt, suite_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BudgetExceeded& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}
