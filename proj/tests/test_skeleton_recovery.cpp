#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "polylearn/gadgets.hpp"
#include "polylearn/information.hpp"
#include "polylearn/skeleton_recovery.hpp"
#include "support.hpp"

using namespace polylearn;
using namespace testing_support;

TEST_CASE("pairwise mi") {
  const auto coins = product(JointTable(Alphabet{2}, {0.3, 0.7}), JointTable::uniform(Alphabet{3}));
  CHECK(std::abs(pairwise_mi(coins)(0, 1)) <= 1e-12);
  CHECK(pairwise_mi(joint_distribution(binary_chain(2, 0.0)))(0, 1) == doctest::Approx(1.0).epsilon(1e-12));

  const auto g = build_gadget(0.2);
  const auto exact = pairwise_mi(g.p1);
  CHECK(exact(gadget_vars::X, gadget_vars::Z) == doctest::Approx(brute_cmi(g.p1, {0}, {1})).epsilon(1e-12));
  CHECK(exact(gadget_vars::Z, gadget_vars::X) == exact(gadget_vars::X, gadget_vars::Z));

  // plug-in on a dataset that enumerates the table
  const Dataset data(Alphabet{2, 2}, {0, 0, 0, 0, 0, 1, 1, 1});
  const JointTable freq(Alphabet{2, 2}, {0.5, 0.25, 0, 0.25});
  CHECK(pairwise_mi(data)(0, 1) == doctest::Approx(brute_cmi(freq, {0}, {1})).epsilon(1e-12));
}

TEST_CASE("chow-liu recovers a chain and respects pruning") {
  const auto chain = binary_chain(5, 0.1);
  CHECK(chow_liu_skeleton(pairwise_mi(joint_distribution(chain))) == chain.graph().skeleton());

  // two independent chains side by side
  const auto left = joint_distribution(binary_chain(3, 0.1));
  const auto right = joint_distribution(binary_chain(3, 0.2));
  const auto both = product(left, right);
  const Skeleton truth(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  const PolytreeGraph g(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  const auto report = check_assumption(both, g);
  REQUIRE(report.satisfied);
  const auto mi = pairwise_mi(both);
  CHECK(chow_liu_skeleton(mi, report.epsilon_p / 2) == truth);
  CHECK(chow_liu_skeleton(mi).edges().size() == 5);

  MiMatrix two(2);
  two.set(0, 1, 0.3);
  CHECK(chow_liu_skeleton(two).edges() == std::vector<UndirectedEdge>{{0, 1}});
}

TEST_CASE("chow-liu ties are broken lexicographically") {
  MiMatrix m(3);
  m.set(0, 1, 0.5);
  m.set(0, 2, 0.5);
  m.set(1, 2, 0.5);
  CHECK(chow_liu_skeleton(m).edges() == std::vector<UndirectedEdge>{{0, 1}, {0, 2}});
}

TEST_CASE("assumption gap") {
  const auto copy = joint_distribution(binary_chain(3, 0.0));
  const auto broken = check_assumption(copy, binary_chain(3, 0.0).graph());
  CHECK_FALSE(broken.satisfied);
  CHECK(broken.epsilon_p == 0.0);
  REQUIRE(broken.witness.has_value());
  CHECK(broken.witness->u == 0);
  CHECK(broken.witness->v == 2);

  // binary symmetric channels: edges carry 1 - h(p), the two-hop pair 1 - h(2p(1-p))
  const double p = 0.2;
  const auto noisy = binary_chain(3, p);
  const auto rep = check_assumption(joint_distribution(noisy), noisy.graph());
  const double edge = 1 - binary_entropy(p);
  const double hop = 1 - binary_entropy(2 * p * (1 - p));
  CHECK(rep.satisfied);
  CHECK(rep.epsilon_p == doctest::Approx(std::min(edge, edge - hop)).epsilon(1e-12));

  const auto none = check_assumption(JointTable::uniform(Alphabet{2, 2}), PolytreeGraph(2));
  CHECK(none.epsilon_p == std::numeric_limits<double>::infinity());
  CHECK(none.satisfied);
  CHECK(to_json(none).find("\"epsilon_p\": null") != std::string::npos);
}

TEST_CASE("edge list round trip") {
  const Skeleton s(5, {{0, 3}, {1, 3}, {3, 4}});
  std::stringstream io;
  write_edge_list(s, io);
  CHECK(io.str() == "0 3\n1 3\n3 4\n");
  CHECK(read_edge_list(5, io) == s);
  std::stringstream bad("0 1\n1 0\n");
  CHECK_THROWS_AS(read_edge_list(2, bad), std::invalid_argument);
}
