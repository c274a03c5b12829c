#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "polylearn/core.hpp"

namespace polylearn {

struct Arc {
  Vertex parent;
  Vertex child;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

struct UndirectedEdge {
  Vertex u;  // u < v
  Vertex v;
  friend auto operator<=>(const UndirectedEdge&, const UndirectedEdge&) = default;
};

UndirectedEdge make_edge(Vertex a, Vertex b);

/// Undirected forest over vertices 0..n-1.
class Skeleton {
 public:
  Skeleton() = default;
  /// Throws std::invalid_argument on self-loops, duplicates, out-of-range
  /// endpoints or cycles.
  Skeleton(std::size_t n, std::vector<UndirectedEdge> edges);

  std::size_t vertex_count() const noexcept { return adjacency_.size(); }
  /// Sorted ascending (u, v) with u < v.
  const std::vector<UndirectedEdge>& edges() const noexcept { return edges_; }
  /// Sorted ascending.
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(v); }
  bool adjacent(Vertex a, Vertex b) const;

  /// Vertices of the unique path from `from` to `to`, endpoints included;
  /// empty when they lie in different components.
  std::vector<Vertex> path(Vertex from, Vertex to) const;

  friend bool operator==(const Skeleton& a, const Skeleton& b) {
    return a.vertex_count() == b.vertex_count() && a.edges_ == b.edges_;
  }

 private:
  std::vector<UndirectedEdge> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

/// Directed graph whose skeleton is a forest.
class PolytreeGraph {
 public:
  PolytreeGraph() = default;
  explicit PolytreeGraph(std::size_t n) : parents_(n), children_(n) {}
  /// Throws std::invalid_argument if the arcs do not form a polytree.
  PolytreeGraph(std::size_t n, std::vector<Arc> arcs);

  std::size_t vertex_count() const noexcept { return parents_.size(); }
  /// Sorted by (parent, child).
  std::vector<Arc> arcs() const;
  std::size_t arc_count() const noexcept;
  const std::vector<Vertex>& parents(Vertex v) const { return parents_.at(v); }
  const std::vector<Vertex>& children(Vertex v) const { return children_.at(v); }
  bool has_arc(Vertex parent, Vertex child) const;

  std::size_t max_in_degree() const noexcept;
  bool is_d_polytree(std::size_t d) const noexcept { return max_in_degree() <= d; }

  Skeleton skeleton() const;
  /// Parents before children; ties broken by lowest index.
  std::vector<Vertex> topological_order() const;

  friend bool operator==(const PolytreeGraph& a, const PolytreeGraph& b) {
    return a.parents_ == b.parents_;
  }

 private:
  std::vector<std::vector<Vertex>> parents_;  // sorted
  std::vector<std::vector<Vertex>> children_;  // sorted
};

}  // namespace polylearn
