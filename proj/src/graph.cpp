#include "polylearn/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polylearn {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string edge_text(Vertex a, Vertex b) {
  return std::to_string(a) + "-" + std::to_string(b);
}

// Rejects self-loops, out-of-range endpoints, duplicates and cycles.
void require_forest(std::size_t n, const std::vector<UndirectedEdge>& edges) {
  DisjointSets sets(n);
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) throw std::invalid_argument("edge " + edge_text(e.u, e.v) + " out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop at " + std::to_string(e.u));
    if (!sets.unite(e.u, e.v)) {
      throw std::invalid_argument("edge " + edge_text(e.u, e.v) +
                                  " duplicates an edge or closes an undirected cycle");
    }
  }
}

}  // namespace

UndirectedEdge make_edge(Vertex a, Vertex b) { return a < b ? UndirectedEdge{a, b} : UndirectedEdge{b, a}; }

Skeleton::Skeleton(std::size_t n, std::vector<UndirectedEdge> edges) : adjacency_(n) {
  for (auto& e : edges) e = make_edge(e.u, e.v);
  require_forest(n, edges);
  std::sort(edges.begin(), edges.end());
  edges_ = std::move(edges);
  for (const auto& e : edges_) {
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool Skeleton::adjacent(Vertex a, Vertex b) const {
  const auto& nbrs = adjacency_.at(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<Vertex> Skeleton::path(Vertex from, Vertex to) const {
  const std::size_t n = vertex_count();
  if (from >= n || to >= n) throw std::out_of_range("path endpoint out of range");
  constexpr Vertex kUnseen = static_cast<Vertex>(-1);
  std::vector<Vertex> prev(n, kUnseen);
  std::vector<Vertex> stack{from};
  prev[from] = from;
  while (!stack.empty()) {
    Vertex x = stack.back();
    stack.pop_back();
    if (x == to) break;
    for (Vertex y : adjacency_[x]) {
      if (prev[y] == kUnseen) {
        prev[y] = x;
        stack.push_back(y);
      }
    }
  }
  if (prev[to] == kUnseen) return {};
  std::vector<Vertex> out{to};
  while (out.back() != from) out.push_back(prev[out.back()]);
  std::reverse(out.begin(), out.end());
  return out;
}

PolytreeGraph::PolytreeGraph(std::size_t n, std::vector<Arc> arcs) : parents_(n), children_(n) {
  std::vector<UndirectedEdge> undirected;
  undirected.reserve(arcs.size());
  for (const auto& a : arcs) undirected.push_back(make_edge(a.parent, a.child));
  require_forest(n, undirected);
  for (const auto& a : arcs) {
    parents_[a.child].push_back(a.parent);
    children_[a.parent].push_back(a.child);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  for (auto& c : children_) std::sort(c.begin(), c.end());
}

std::vector<Arc> PolytreeGraph::arcs() const {
  std::vector<Arc> out;
  for (Vertex p = 0; p < children_.size(); ++p) {
    for (Vertex c : children_[p]) out.push_back({p, c});
  }
  return out;
}

std::size_t PolytreeGraph::arc_count() const noexcept {
  std::size_t count = 0;
  for (const auto& p : parents_) count += p.size();
  return count;
}

bool PolytreeGraph::has_arc(Vertex parent, Vertex child) const {
  const auto& p = parents_.at(child);
  return std::binary_search(p.begin(), p.end(), parent);
}

std::size_t PolytreeGraph::max_in_degree() const noexcept {
  std::size_t best = 0;
  for (const auto& p : parents_) best = std::max(best, p.size());
  return best;
}

Skeleton PolytreeGraph::skeleton() const {
  std::vector<UndirectedEdge> edges;
  for (const auto& a : arcs()) edges.push_back(make_edge(a.parent, a.child));
  return Skeleton(vertex_count(), std::move(edges));
}

std::vector<Vertex> PolytreeGraph::topological_order() const {
  const std::size_t n = vertex_count();
  std::vector<std::size_t> pending(n);
  std::vector<Vertex> ready;
  for (Vertex v = 0; v < n; ++v) {
    pending[v] = parents_[v].size();
    if (pending[v] == 0) ready.push_back(v);
  }
  std::vector<Vertex> order;
  order.reserve(n);
  // `ready` is kept as a min-heap so the order is canonical.
  auto cmp = std::greater<Vertex>();
  std::make_heap(ready.begin(), ready.end(), cmp);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), cmp);
    Vertex v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (Vertex c : children_[v]) {
      if (--pending[c] == 0) {
        ready.push_back(c);
        std::push_heap(ready.begin(), ready.end(), cmp);
      }
    }
  }
  return order;
}

}  // namespace polylearn
