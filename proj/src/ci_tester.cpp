#include "polylearn/ci_tester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "polylearn/information.hpp"

namespace polylearn {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::size_t TesterConfig::variable_count() const {
  return std::visit(Overloaded{
                        [](const EmpiricalSource& s) { return s.data ? s.data->variable_count() : 0; },
                        [](const FrequencySource& s) {
                          return s.frequencies ? s.frequencies->variable_count() : 0;
                        },
                        [](const OracleSource& s) { return s.joint ? s.joint->variable_count() : 0; },
                    },
                    source);
}

void TesterConfig::validate() const {
  if (!(constant > 0.0 && constant < 1.0)) throw std::invalid_argument("tester constant C must lie in (0, 1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("tester epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("tester delta must lie in (0, 1)");
  const bool has_data = std::visit(Overloaded{
                                       [](const EmpiricalSource& s) { return s.data && s.data->row_count() > 0; },
                                       [](const FrequencySource& s) { return s.frequencies != nullptr; },
                                       [](const OracleSource& s) { return s.joint != nullptr; },
                                   },
                                   source);
  if (!has_data) throw std::invalid_argument("tester has no data source");
}

TesterConfig oracle_tester(const JointTable& joint, double epsilon, double constant) {
  TesterConfig cfg;
  cfg.constant = constant;
  cfg.epsilon = epsilon;
  cfg.source = OracleSource{std::make_shared<const JointTable>(joint)};
  return cfg;
}

TesterConfig empirical_tester(Dataset data, double epsilon, double delta, double constant) {
  TesterConfig cfg;
  cfg.constant = constant;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.source = EmpiricalSource{std::make_shared<const Dataset>(std::move(data))};
  return cfg;
}

TestVerdict test_cmi(const TesterConfig& cfg, std::span<const Vertex> a, std::span<const Vertex> b,
                     std::span<const Vertex> z) {
  const std::size_t n = cfg.variable_count();
  for (auto set : {a, b, z}) {
    for (Vertex v : set) {
      if (v >= n) throw std::out_of_range("variable " + std::to_string(v) + " not covered by the tester source");
    }
  }
  const double estimate = std::visit(
      Overloaded{
          [&](const EmpiricalSource& s) { return empirical_cmi(*s.data, a, b, z); },
          [&](const FrequencySource& s) { return conditional_mutual_information(*s.frequencies, a, b, z); },
          [&](const OracleSource& s) { return conditional_mutual_information(*s.joint, a, b, z); },
      },
      cfg.source);
  TestVerdict verdict;
  verdict.estimate = estimate;
  verdict.threshold = cfg.threshold();
  verdict.is_large = estimate >= verdict.threshold;
  return verdict;
}

std::uint64_t required_sample_size(std::uint64_t sigma_x, std::uint64_t sigma_y, std::uint64_t sigma_z,
                                   double epsilon, double delta) {
  if (sigma_x < 1 || sigma_y < 1 || sigma_z < 1) throw std::invalid_argument("alphabet sizes must be at least 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  const double cells = static_cast<double>(sigma_x) * static_cast<double>(sigma_y) * static_cast<double>(sigma_z);
  const double largest = static_cast<double>(std::max({sigma_x, sigma_y, sigma_z}));
  const double n = 6.48e6 * cells * (std::log(largest / (epsilon * delta)) + std::log(7.2e5)) *
                   std::log(12.0 * largest * largest / delta) / epsilon;
  const double rounded = std::ceil(n);
  if (!(rounded < 18446744073709549568.0)) throw std::overflow_error("required sample size exceeds 64 bits");
  return static_cast<std::uint64_t>(rounded);
}

}  // namespace polylearn
