#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "polylearn/gadgets.hpp"
#include "polylearn/information.hpp"
#include "polylearn/instance_gen.hpp"
#include "polylearn/sampling.hpp"
#include "support.hpp"

using namespace polylearn;
using namespace testing_support;

TEST_CASE("copy chain samples are constant strings") {
  const auto data = forward_sample(binary_chain(5, 0.0), 2000, RngSeed{1});
  CHECK(data.row_count() == 2000);
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    for (Vertex v = 1; v < 5; ++v) CHECK(data(r, v) == data(r, 0));
  }
}

TEST_CASE("fair coin mean") {
  DiscreteBayesNet bn(PolytreeGraph(1), Alphabet{2}, {make_cpt(0, {}, 2, {0.5, 0.5})});
  const auto data = forward_sample(bn, 100000, RngSeed{2});
  double ones = 0;
  for (std::size_t r = 0; r < data.row_count(); ++r) ones += data(r, 0);
  CHECK(std::abs(ones / 100000 - 0.5) <= 0.01);
}

TEST_CASE("P1 atom frequency") {
  // P1 is Markov to X -> Z -> Y, so its projection there samples P1 exactly
  const auto g = build_gadget(0.2);
  const auto bn = project_onto(g.p1, g.g1);
  const auto data = forward_sample(bn, 200000, RngSeed{3});
  std::size_t hits = 0;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    hits += data(r, 0) == 0 && data(r, 1) == 0 && data(r, 2) == 0;
  }
  CHECK(std::abs(static_cast<double>(hits) / 200000 - 0.225) <= 0.005);
}

TEST_CASE("seeded determinism") {
  const auto bn = figure1_fixture(RngSeed{4});
  CHECK(forward_sample(bn, 500, RngSeed{9}) == forward_sample(bn, 500, RngSeed{9}));
  CHECK_FALSE(forward_sample(bn, 500, RngSeed{9}) == forward_sample(bn, 500, RngSeed{10}));
}

TEST_CASE("empirical joint edge cases") {
  const Dataset one(Alphabet{2, 3}, {1, 2});
  const Vertex both[] = {0, 1};
  const auto j = empirical_joint(one, both);
  for (std::size_t f = 0; f < 6; ++f) CHECK(j[f] == (f == 5 ? 1.0 : 0.0));

  const auto s = empirical_joint(one, std::span<const Vertex>{});
  CHECK(s.size() == 1);
  CHECK(s[0] == 1.0);

  const Dataset constant(Alphabet{2, 2}, {0, 1, 0, 0, 0, 1});
  const Vertex first[] = {0};
  CHECK(empirical_joint(constant, first)[0] == 1.0);

  const Dataset empty(Alphabet{2}, {});
  CHECK_THROWS_AS(empirical_joint(empty, first), std::invalid_argument);
  CHECK_THROWS_AS(Dataset(Alphabet{2}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset(Alphabet{2, 2}, {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("plug-in cmi") {
  const Vertex a[] = {0};
  const Vertex b[] = {2};
  const Vertex z[] = {1};
  const Dataset same(Alphabet{2, 2, 2}, {1, 0, 1, 1, 0, 1, 1, 0, 1});
  CHECK(empirical_cmi(same, a, b, z) == 0.0);

  // rows enumerated in proportion to a rational joint reproduce its exact CMI
  const std::vector<int> weights{3, 1, 2, 2, 1, 4, 2, 1};
  std::vector<Symbol> rows;
  std::vector<double> pmf;
  const int total = std::accumulate(weights.begin(), weights.end(), 0);
  for (std::size_t f = 0; f < 8; ++f) {
    for (int k = 0; k < weights[f]; ++k) {
      rows.push_back(static_cast<Symbol>(f >> 2 & 1));
      rows.push_back(static_cast<Symbol>(f >> 1 & 1));
      rows.push_back(static_cast<Symbol>(f & 1));
    }
    pmf.push_back(static_cast<double>(weights[f]) / total);
  }
  const Dataset data(Alphabet::uniform(3, 2), rows);
  const JointTable exact(Alphabet::uniform(3, 2), pmf);
  CHECK(empirical_cmi(data, a, b, z) == doctest::Approx(brute_cmi(exact, {0}, {2}, {1})).epsilon(1e-12));

  const auto xor_data = forward_sample(xor_collider(), 50000, RngSeed{5});
  CHECK(std::abs(empirical_cmi(xor_data, a, b, z) - 1.0) <= 0.02);
}

TEST_CASE("multinomial counts") {
  const auto p = joint_distribution(figure1_fixture(RngSeed{6}));
  const auto counts = sample_counts(p, 1000000, RngSeed{7});
  CHECK(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == 1000000);
  const JointTable lumpy(Alphabet{2, 2}, {0.5, 0, 0.5, 0});
  const auto c = sample_counts(lumpy, 12345, RngSeed{8});
  CHECK(c[1] == 0);
  CHECK(c[3] == 0);
  const auto f = frequencies(p.alphabet(), counts);
  CHECK(brute_kl(f, p) < 1e-3);
  CHECK(sample_counts(p, 1u << 20, RngSeed{9}) == sample_counts(p, 1u << 20, RngSeed{9}));
}

TEST_CASE("csv output") {
  const Dataset data(Alphabet{2, 3, 2}, {0, 2, 1, 1, 0, 0});
  std::ostringstream out;
  write_csv(data, out);
  CHECK(out.str() == "v0,v1,v2\n0,2,1\n1,0,0\n");
}
