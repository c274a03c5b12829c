#include <doctest.h>

#include <algorithm>
#include <memory>
#include <sstream>

#include "polylearn/information.hpp"
#include "polylearn/instance_gen.hpp"
#include "polylearn/orientation.hpp"
#include "support.hpp"

using namespace polylearn;
using namespace testing_support;

namespace {

enum : Vertex { a, b, c, d, e, f, g, h, i, j };

OrientationConfig oracle_cfg(const JointTable& p, std::size_t degree, double eps = 1e-9) {
  OrientationConfig cfg;
  cfg.in_degree_bound = degree;
  cfg.tester = oracle_tester(p, eps);
  return cfg;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("orient moves an edge between partitions exactly once") {
  PartialOrientation st(figure1_graph().skeleton());
  CHECK(st.unoriented(d) == std::set<Vertex>{a, b, c, f});
  st.orient(a, d);
  CHECK(st.incoming(d) == std::set<Vertex>{a});
  CHECK(st.outgoing(a) == std::set<Vertex>{d});
  CHECK_FALSE(st.is_unoriented(a, d));
  CHECK(st.partition_holds());
  CHECK_THROWS_AS(st.orient(a, d), OrientationError);
  CHECK_THROWS_AS(st.orient(d, a), OrientationError);
  CHECK_THROWS_AS(st.orient(a, b), OrientationError);
}

TEST_CASE("phase 1 finds the xor collider and ignores a chain") {
  OrientationTrace trace;
  PartialOrientation st(xor_collider().graph().skeleton());
  phase1(st, oracle_cfg(joint_distribution(xor_collider()), 2), trace);
  CHECK(st.incoming(1) == std::set<Vertex>{0, 2});
  REQUIRE(trace.events().size() == 2);
  CHECK(trace.events()[0].rule == "v-structure");

  const auto chain = binary_chain(3, 0.1);
  PartialOrientation cs(chain.graph().skeleton());
  OrientationTrace ct;
  phase1(cs, oracle_cfg(joint_distribution(chain), 2), ct);
  CHECK(cs.oriented_arcs().empty());
  CHECK(ct.events().empty());
}

TEST_CASE("phase 1 on the ten-node network finds the degree-3 collider at d") {
  const auto bn = figure1_fixture(RngSeed{2024}, 0.05);
  PartialOrientation st(bn.graph().skeleton());
  OrientationTrace trace;
  phase1(st, oracle_cfg(joint_distribution(bn), 3), trace);
  CHECK(st.incoming(d) == std::set<Vertex>{a, b, c});
  CHECK(st.outgoing(d).count(f) + st.unoriented(d).count(f) == 1);
}

TEST_CASE("phase 2 local search takes the marginal branch on a chain") {
  const auto chain = binary_chain(3, 0.2);
  const auto p = joint_distribution(chain);
  // the two quantities the branch looks at
  CHECK(brute_cmi(p, {2}, {0}, {1}) <= 1e-12);
  CHECK(brute_cmi(p, {2}, {0}) > 0.01);

  PartialOrientation st(chain.graph().skeleton());
  st.orient(0, 1);
  OrientationTrace trace;
  phase2(st, oracle_cfg(p, 2), trace);
  CHECK(st.outgoing(1) == std::set<Vertex>{2});
  REQUIRE(trace.events().size() == 1);
  CHECK(trace.events()[0].rule == "local-out");
  CHECK(trace.events()[0].tests.size() == 2);
}

TEST_CASE("meek rule fires once the parent budget is used") {
  const auto chain = binary_chain(3, 0.2);
  PartialOrientation st(chain.graph().skeleton());
  st.orient(0, 1);
  OrientationTrace trace;
  phase2(st, oracle_cfg(joint_distribution(chain), 1), trace);
  CHECK(st.outgoing(1) == std::set<Vertex>{2});
  REQUIRE(trace.events().size() == 1);
  CHECK(trace.events()[0].rule == "meek-r1");
  CHECK(trace.events()[0].tests.empty());
}

TEST_CASE("neither branch fires for an independent neighbor") {
  // 0 -> 1 correlated, 2 independent of both, skeleton 0 - 1 - 2
  const auto pair = joint_distribution(binary_chain(2, 0.2));
  const auto p = product(pair, JointTable(Alphabet{2}, {0.3, 0.7}));
  PartialOrientation st(Skeleton(3, {{0, 1}, {1, 2}}));
  st.orient(0, 1);
  OrientationTrace trace;
  phase2(st, oracle_cfg(p, 2), trace);
  CHECK(st.is_unoriented(1, 2));
  CHECK(trace.events().empty());
}

TEST_CASE("phase 3 roots each component at its lowest vertex") {
  PartialOrientation st(Skeleton(10, {make_edge(c, d), make_edge(d, f), make_edge(f, e), make_edge(e, h)}));
  const auto out = phase3(st);
  CHECK(out.arcs() == std::vector<Arc>{{c, d}, {d, f}, {e, h}, {f, e}});

  PartialOrientation done(Skeleton(3, {{0, 1}, {1, 2}}));
  done.orient(2, 1);
  done.orient(1, 0);
  CHECK(phase3(done).arcs() == std::vector<Arc>{{1, 0}, {2, 1}});
}

TEST_CASE("phase 3 gives at most one new in-edge per vertex") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    InstanceSpec spec;
    spec.n = 12;
    spec.in_degree_bound = 3;
    spec.edge_drop_probability = 0.2;
    spec.seed = RngSeed{s};
    const auto skel = random_polytree(spec).graph().skeleton();
    PartialOrientation st(skel);
    const auto out = phase3(st);
    CHECK(out.skeleton() == skel);
    CHECK(out.max_in_degree() <= 1);
  }
}

TEST_CASE("learn orientation end to end") {
  OrientationConfig two;
  two.in_degree_bound = 1;
  two.tester = oracle_tester(JointTable::uniform(Alphabet{2, 2}), 0.1);
  const auto empty = learn_orientation(Skeleton(2, {}), two);
  CHECK(empty.graph.arc_count() == 0);

  const auto bn = figure1_fixture(RngSeed{2024}, 0.05);
  const auto p = joint_distribution(bn);
  const auto res = learn_orientation(bn.graph().skeleton(), oracle_cfg(p, 3));
  const double gap = mi_score(p, bn.graph()) - mi_score(p, res.graph);
  CHECK(gap <= 10 * 4 * 1e-9);
  CHECK(res.graph == bn.graph());
  CHECK(res.graph.skeleton() == bn.graph().skeleton());

  const auto replay = res.trace.replay(bn.graph().skeleton());
  CHECK(replay.unoriented_edges().empty());
  CHECK(replay.oriented_arcs() == res.graph.arcs());
  CHECK(count_lines(res.trace.to_jsonl()) == res.trace.events().size());

  CHECK_THROWS_AS(learn_orientation(Skeleton(3, {{0, 1}}), oracle_cfg(p, 3)), std::invalid_argument);
  auto bad = oracle_cfg(p, 0);
  CHECK_THROWS_AS(learn_orientation(bn.graph().skeleton(), bad), std::invalid_argument);
}

TEST_CASE("empirical orientation is usually close in KL") {
  const auto bn = figure1_fixture(RngSeed{2024}, 0.05);
  const auto p = joint_distribution(bn);
  const double eps = 0.1;
  int good = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    OrientationConfig cfg;
    cfg.in_degree_bound = 3;
    cfg.tester = empirical_tester(forward_sample(bn, 100000, RngSeed{s}), per_test_epsilon(eps, 10, 3), 0.1, 0.5);
    const auto res = learn_orientation(bn.graph().skeleton(), cfg);
    good += kl_divergence(p, joint_distribution(project_onto(p, res.graph))) <= eps;
  }
  CHECK(good >= 45);
}

TEST_CASE("per-test epsilon") {
  CHECK(per_test_epsilon(0.1, 10, 3) == doctest::Approx(0.1 / 80));
  CHECK_THROWS_AS(per_test_epsilon(0.1, 0, 3), std::invalid_argument);
}
