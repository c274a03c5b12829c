#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polylearn/rng.hpp"

namespace polylearn {

struct PropertySuiteOptions {
  RngSeed seed{20260101};
  /// Negative control: scale one CPT row so it sums to 0.9 before the
  /// row-sum check runs. That check must then fail.
  bool corrupt_cpt_row = false;
  /// Run only checks whose name contains this substring.
  std::optional<std::string> filter;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  std::string detail;
  double seconds = 0.0;
};

std::vector<std::string> property_check_names();
std::vector<CheckResult> run_property_suite(const PropertySuiteOptions& options = {});
bool all_passed(const std::vector<CheckResult>& results);
std::string to_json(const std::vector<CheckResult>& results);

}  // namespace polylearn
