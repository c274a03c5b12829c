#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polylearn/ci_tester.hpp"
#include "polylearn/graph.hpp"

namespace polylearn {

/// Skeleton plus the in/out/unoriented neighbor partition of every vertex.
///
/// Edges only ever move from unoriented to oriented; there is no way to undo
/// an orientation.
class PartialOrientation {
 public:
  explicit PartialOrientation(Skeleton skeleton);

  const Skeleton& skeleton() const noexcept { return skeleton_; }
  std::size_t vertex_count() const noexcept { return skeleton_.vertex_count(); }

  const std::set<Vertex>& incoming(Vertex v) const { return in_.at(v); }
  const std::set<Vertex>& outgoing(Vertex v) const { return out_.at(v); }
  const std::set<Vertex>& unoriented(Vertex v) const { return un_.at(v); }

  /// Orients u - v as u -> v. Throws OrientationError if u - v is not an
  /// unoriented skeleton edge.
  void orient(Vertex u, Vertex v);

  bool is_unoriented(Vertex u, Vertex v) const;

  /// Checks N = in + out + un (disjoint) at every vertex and arc symmetry.
  bool partition_holds() const;

  std::vector<Arc> oriented_arcs() const;
  std::vector<UndirectedEdge> unoriented_edges() const;

 private:
  Skeleton skeleton_;
  std::vector<std::set<Vertex>> in_;
  std::vector<std::set<Vertex>> out_;
  std::vector<std::set<Vertex>> un_;
};

struct OrientationConfig {
  std::size_t in_degree_bound = 1;  // d
  TesterConfig tester;              // carries C and the per-test epsilon

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Union-bound per-test tolerance eps / (2 n (d + 1)).
double per_test_epsilon(double epsilon, std::size_t n, std::size_t d);

struct TestRecord {
  std::vector<Vertex> a;
  std::vector<Vertex> b;
  std::vector<Vertex> z;
  double value = 0.0;
  double threshold = 0.0;
};

struct OrientationEvent {
  int phase = 0;
  std::string rule;  // "v-structure", "meek-r1", "local-in", "local-out", "free"
  Vertex u = 0;      // oriented u -> v
  Vertex v = 0;
  std::vector<TestRecord> tests;
};

class OrientationTrace {
 public:
  void record(OrientationEvent event) { events_.push_back(std::move(event)); }
  const std::vector<OrientationEvent>& events() const noexcept { return events_; }

  /// Applies every recorded orientation, in order, to a fresh state.
  PartialOrientation replay(const Skeleton& skeleton) const;

  /// One JSON object per line: {"phase", "rule", "u", "v", "tests": [{"vars", "value", "threshold"}]}.
  std::string to_jsonl() const;

 private:
  std::vector<OrientationEvent> events_;
};

/// Strong v-structures. For gamma = d..2, every vertex v (ascending) and every
/// size-gamma subset T of in(v) u un(v) (lexicographic): if |T u in(v)| <= d
/// and the test of u against T\{u} given v reaches the threshold for all u in
/// T, orient every member of T into v.
void phase1(PartialOrientation& state, const OrientationConfig& cfg, OrientationTrace& trace);

/// Local search and Meek R1(d) to a fixpoint. Each pass applies R1(d)
/// exhaustively, then one local-search sweep. Returns the number of passes.
std::size_t phase2(PartialOrientation& state, const OrientationConfig& cfg,
                   OrientationTrace& trace);

/// Orients the forest of remaining unoriented edges away from the lowest
/// vertex of each component and returns the complete graph.
PolytreeGraph phase3(PartialOrientation& state, OrientationTrace* trace = nullptr);

struct OrientationResult {
  PolytreeGraph graph;
  OrientationTrace trace;
  std::vector<Arc> tested_arcs;  // arcs fixed by phases 1-2
  std::size_t phase2_passes = 0;
};

/// Phases 1-3 on the given skeleton. Throws std::invalid_argument on an
/// invalid config or a skeleton whose size does not match the tester source.
OrientationResult learn_orientation(const Skeleton& skeleton, const OrientationConfig& cfg);

}  // namespace polylearn
