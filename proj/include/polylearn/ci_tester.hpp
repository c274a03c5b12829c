#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>

#include "polylearn/joint_table.hpp"
#include "polylearn/sampling.hpp"

namespace polylearn {

/// Default threshold constant C. With enough samples the estimate under
/// independence stays below C * epsilon with probability 1 - delta.
inline constexpr double kDefaultTesterConstant = 1.0 / 400.0;

/// Plug-in estimates from a dataset.
struct EmpiricalSource {
  std::shared_ptr<const Dataset> data;
};

/// Plug-in estimates from an already-tallied empirical distribution (the
/// sufficient statistics of a sample). Used when the sample is too large to
/// materialize row by row.
struct FrequencySource {
  std::shared_ptr<const JointTable> frequencies;
  std::uint64_t sample_count = 0;
};

/// Exact values from the true joint: the infinite-sample limit.
struct OracleSource {
  std::shared_ptr<const JointTable> joint;
};

using TesterSource = std::variant<EmpiricalSource, FrequencySource, OracleSource>;

struct TesterConfig {
  double constant = kDefaultTesterConstant;  // C, in (0, 1)
  double epsilon = 0.0;                      // per-test tolerance, bits
  double delta = 0.1;                        // failure probability, in (0, 1)
  TesterSource source;

  double threshold() const noexcept { return constant * epsilon; }
  std::size_t variable_count() const;
  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct TestVerdict {
  double estimate = 0.0;   // bits
  double threshold = 0.0;  // bits, C * epsilon
  bool is_large = false;   // estimate >= threshold

  /// Strict comparison, for callers whose rule is "> C * epsilon".
  bool exceeds() const noexcept { return estimate > threshold; }
};

TesterConfig oracle_tester(const JointTable& joint, double epsilon,
                           double constant = kDefaultTesterConstant);
TesterConfig empirical_tester(Dataset data, double epsilon, double delta,
                              double constant = kDefaultTesterConstant);

/// Estimate I(A;B|Z) from the configured source and compare with C * epsilon.
/// Throws std::invalid_argument on overlapping sets and std::out_of_range on
/// variables the source does not cover.
TestVerdict test_cmi(const TesterConfig& cfg, std::span<const Vertex> a, std::span<const Vertex> b,
                     std::span<const Vertex> z);

/// Explicit-constant sample size for the CMI tester:
///
///   N = ceil(6.48e6 * sx*sy*sz * (ln(S/(eps*delta)) + ln(7.2e5)) * ln(12 S^2/delta) / eps)
///
/// with S = max(sx, sy, sz). Natural logarithms throughout. The constant is
/// very conservative; realistic testers need orders of magnitude fewer
/// samples. Throws std::invalid_argument for cardinalities < 1 or eps, delta
/// outside (0, 1], std::overflow_error if N does not fit in 64 bits.
std::uint64_t required_sample_size(std::uint64_t sigma_x, std::uint64_t sigma_y,
                                   std::uint64_t sigma_z, double epsilon, double delta);

}  // namespace polylearn
