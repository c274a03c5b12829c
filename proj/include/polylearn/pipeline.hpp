#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polylearn/ci_tester.hpp"
#include "polylearn/instance_gen.hpp"
#include "polylearn/rng.hpp"

namespace polylearn {

enum class TesterMode { oracle, empirical };
enum class SkeletonSource { given, chow_liu };
enum class InstanceSource { random, figure1 };

const char* to_string(TesterMode mode);
const char* to_string(SkeletonSource source);
const char* to_string(InstanceSource source);

/// Everything one `learn` run depends on. Echoed verbatim in the preamble.
struct LearnConfig {
  InstanceSource instance = InstanceSource::random;
  std::size_t n = 8;
  std::size_t in_degree_bound = 3;  // d, used both to generate and to learn
  std::size_t alphabet_size = 2;
  double concentration = 1.0;
  std::optional<double> min_edge_mi = 0.01;
  double edge_drop_probability = 0.0;

  double epsilon = 0.1;
  double delta = 0.1;
  double tester_constant = kDefaultTesterConstant;
  std::optional<double> test_epsilon;  // overrides eps / (2 n (d + 1))

  TesterMode mode = TesterMode::empirical;
  SkeletonSource skeleton = SkeletonSource::given;
  std::vector<std::uint64_t> sample_sizes{1000};  // ignored in oracle mode
  double kappa = 1.0;
  std::size_t trials = 1;
  RngSeed seed{0};
  std::size_t jobs = 1;

  /// Throws std::invalid_argument (or BudgetExceeded) before any work starts.
  void validate() const;
  std::size_t vertex_count() const { return instance == InstanceSource::figure1 ? 10 : n; }
  double effective_test_epsilon() const;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t d_star = 0;
  std::uint64_t m = 0;
  TesterMode mode = TesterMode::empirical;
  bool skeleton_ok = false;
  double graph_gap_bits = 0.0;     // mi_score(P, G*) - mi_score(P, G hat)
  double kl_total_bits = 0.0;      // KL(P || P hat)
  double kl_param_gap_bits = 0.0;  // KL(P || P hat) - KL(P || P_{G hat})
  double runtime_ms = 0.0;
};

inline constexpr const char* kTrialCsvHeader =
    "trial,seed,n,d,d_star,m,mode,skeleton_ok,graph_gap_bits,kl_total_bits,kl_param_gap_bits,runtime_ms";

/// The instance of trial `t`. Shared by every sample size of that trial. A
/// random graph whose CPTs exhaust resampling is redrawn (up to 20 times).
DiscreteBayesNet trial_instance(const LearnConfig& cfg, std::size_t trial);

/// One (trial, sample size) cell. `m` is ignored in oracle mode.
TrialResult run_trial(const LearnConfig& cfg, std::size_t trial, std::uint64_t m);

/// All cells, trial-major then in sweep order, run on up to cfg.jobs threads.
std::vector<TrialResult> run_learn(const LearnConfig& cfg);

/// "# key=value" lines describing the run.
std::string preamble(const LearnConfig& cfg, const std::vector<std::string>& command_line = {});
std::string csv_row(const TrialResult& r, bool with_runtime = true);
void write_results(const LearnConfig& cfg, const std::vector<TrialResult>& rows, std::ostream& out,
                   const std::vector<std::string>& command_line = {});

}  // namespace polylearn
