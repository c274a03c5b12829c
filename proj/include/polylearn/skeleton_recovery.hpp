#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "polylearn/graph.hpp"
#include "polylearn/joint_table.hpp"
#include "polylearn/sampling.hpp"

namespace polylearn {

/// Symmetric matrix of pairwise mutual information, bits. Diagonal unused.
class MiMatrix {
 public:
  explicit MiMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(Vertex u, Vertex v) const { return values_[u * n_ + v]; }
  void set(Vertex u, Vertex v, double value) {
    values_[u * n_ + v] = value;
    values_[v * n_ + u] = value;
  }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

/// Plug-in I(u;v) for every pair, from one pass over the rows per pair.
MiMatrix pairwise_mi(const Dataset& data);
/// Exact I(u;v) for every pair.
MiMatrix pairwise_mi(const JointTable& joint);

/// Maximum-weight spanning forest by Kruskal: descending weight, ties by
/// lexicographic (u, v). Edges below `prune_below` are never added.
Skeleton chow_liu_skeleton(const MiMatrix& mi, std::optional<double> prune_below = std::nullopt);

struct GapWitness {
  Vertex u = 0;  // the pair whose condition binds
  Vertex v = 0;
  Vertex edge_a = 0;  // the path edge involved (equals (u, v) for an edge condition)
  Vertex edge_b = 0;
};

/// Largest gap satisfying the Chow-Liu recovery conditions:
///   (1) I(u;v) + gap <= I(a;b) for every non-adjacent connected pair (u, v)
///       and every edge a - b on the path between them;
///   (2) I(a;b) >= gap for every edge.
/// `epsilon_p` is +infinity for a graph with no edges and 0 when violated.
struct GapReport {
  double epsilon_p = 0.0;
  bool satisfied = false;
  std::optional<GapWitness> witness;  // set iff not satisfied
  /// The binding minimum before clamping at zero, for diagnostics.
  double raw_minimum = 0.0;
};

GapReport check_assumption(const JointTable& joint, const PolytreeGraph& g_star);

/// {"epsilon_p": x | null, "epsilon_p_infinite": bool, "satisfied": .., "witness": ..}
std::string to_json(const GapReport& report);

/// One `u v` line per edge, u < v.
void write_edge_list(const Skeleton& skeleton, std::ostream& out);
Skeleton read_edge_list(std::size_t n, std::istream& in);

}  // namespace polylearn
