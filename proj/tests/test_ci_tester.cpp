#include <doctest.h>

#include <cmath>
#include <memory>

#include "polylearn/ci_tester.hpp"
#include "polylearn/gadgets.hpp"
#include "support.hpp"

using namespace polylearn;
using namespace testing_support;

namespace {

double direct_size(double sx, double sy, double sz, double eps, double delta) {
  const long double s = std::max({sx, sy, sz});
  const long double n = 6.48e6L * sx * sy * sz * (std::log(s / (eps * delta)) + std::log(7.2e5L)) *
                        std::log(12 * s * s / delta) / eps;
  return static_cast<double>(std::ceil(n));
}

}  // namespace

TEST_CASE("required sample size follows the closed form") {
  CHECK(static_cast<double>(required_sample_size(2, 2, 1, 0.1, 0.1)) ==
        doctest::Approx(direct_size(2, 2, 1, 0.1, 0.1)).epsilon(1e-12));
  CHECK(static_cast<double>(required_sample_size(3, 2, 4, 0.05, 0.2)) ==
        doctest::Approx(direct_size(3, 2, 4, 0.05, 0.2)).epsilon(1e-12));

  const double ratio = static_cast<double>(required_sample_size(2, 2, 2, 0.01, 0.1)) /
                       static_cast<double>(required_sample_size(2, 2, 2, 0.02, 0.1));
  CHECK(ratio > 1.9);
  CHECK(ratio < 2.2);

  CHECK(required_sample_size(2, 2, 2, 0.1, 0.1) < required_sample_size(2, 2, 4, 0.1, 0.1));
  CHECK(required_sample_size(2, 2, 2, 0.1, 0.1) < required_sample_size(2, 2, 2, 0.1, 0.01));

  CHECK_THROWS_AS(required_sample_size(0, 2, 1, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(required_sample_size(2, 2, 1, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(required_sample_size(2, 2, 1, 0.1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(required_sample_size(1u << 20, 1u << 20, 1u << 20, 1e-6, 1e-6), std::overflow_error);
}

TEST_CASE("oracle verdicts") {
  const Vertex u[] = {0};
  const Vertex v[] = {1};
  const Vertex w[] = {2};
  const auto chain = oracle_tester(joint_distribution(binary_chain(3, 0.1)), 0.1);
  CHECK_FALSE(test_cmi(chain, u, w, v).is_large);

  const auto x = oracle_tester(joint_distribution(xor_collider()), 0.1);
  const auto verdict = test_cmi(x, u, w, v);
  CHECK(verdict.is_large);
  CHECK(verdict.estimate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(verdict.threshold == doctest::Approx(0.1 / 400));
  CHECK_FALSE(test_cmi(x, u, w, std::span<const Vertex>{}).is_large);
}

TEST_CASE("threshold comparison") {
  // estimate exactly at the threshold: large, but not strictly exceeding
  const TestVerdict at{0.5, 0.5, true};
  CHECK(at.is_large);
  CHECK_FALSE(at.exceeds());
}

TEST_CASE("empirical tester on a sampled chain") {
  const auto bn = binary_chain(3, 0.1);
  auto cfg = empirical_tester(forward_sample(bn, 20000, RngSeed{4}), 0.1, 0.1, 0.5);
  const Vertex u[] = {0};
  const Vertex v[] = {1};
  const Vertex w[] = {2};
  CHECK_FALSE(test_cmi(cfg, u, w, v).is_large);
  CHECK(test_cmi(cfg, u, v, std::span<const Vertex>{}).is_large);
  CHECK(cfg.variable_count() == 3);
}

TEST_CASE("calibration on independent coins") {
  const auto n = required_sample_size(2, 2, 1, 0.1, 0.1);
  const auto p = std::make_shared<const JointTable>(JointTable::uniform(Alphabet{2, 2}));
  int large = 0;
  const Vertex a[] = {0};
  const Vertex b[] = {1};
  for (int t = 0; t < 200; ++t) {
    const auto counts = sample_counts(*p, n, RngSeed{static_cast<std::uint64_t>(1000 + t)});
    TesterConfig cfg;
    cfg.epsilon = 0.1;
    cfg.source = FrequencySource{std::make_shared<const JointTable>(frequencies(p->alphabet(), counts)), n};
    large += test_cmi(cfg, a, b, std::span<const Vertex>{}).is_large;
  }
  CHECK(large <= 20);
}

TEST_CASE("tester input errors") {
  auto cfg = oracle_tester(joint_distribution(binary_chain(3, 0.1)), 0.1);
  const Vertex u[] = {0};
  const Vertex far[] = {7};
  CHECK_THROWS_AS(test_cmi(cfg, u, u, std::span<const Vertex>{}), std::invalid_argument);
  CHECK_THROWS_AS(test_cmi(cfg, u, far, std::span<const Vertex>{}), std::out_of_range);
  cfg.constant = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.constant = 0.5;
  cfg.epsilon = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
