#include "polylearn/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

#include "polylearn/information.hpp"

namespace polylearn {
namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

// Uniform labeled tree on n >= 2 vertices from a random Pruefer code.
std::vector<UndirectedEdge> random_tree(std::size_t n, Rng& rng) {
  if (n < 2) return {};
  std::vector<std::size_t> code(n - 2);
  for (auto& c : code) c = uniform_index(rng, n);
  std::vector<std::size_t> degree(n, 1);
  for (auto c : code) ++degree[c];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> leaves;
  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] == 1) leaves.push(v);
  }
  std::vector<UndirectedEdge> edges;
  for (auto c : code) {
    const auto leaf = leaves.top();
    leaves.pop();
    edges.push_back(make_edge(leaf, c));
    if (--degree[c] == 1) leaves.push(c);
  }
  const auto a = leaves.top();
  leaves.pop();
  edges.push_back(make_edge(a, leaves.top()));
  return edges;
}

std::vector<double> dirichlet_row(std::size_t k, double concentration, Rng& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> row(k);
  double total = 0.0;
  while (!(total > 0.0)) {
    total = 0.0;
    for (auto& x : row) total += x = gamma(rng);
  }
  for (auto& x : row) x /= total;
  // Renormalize once more so the row sums to 1 to the last ulp or two.
  total = std::accumulate(row.begin(), row.end(), 0.0);
  for (auto& x : row) x /= total;
  return row;
}

Cpt dirichlet_cpt(const PolytreeGraph& graph, const Alphabet& alphabet, Vertex v, double concentration,
                  Rng& rng) {
  Cpt cpt;
  cpt.node = v;
  cpt.parents = graph.parents(v);
  cpt.cols = alphabet.size(v);
  cpt.rows = alphabet.table_size(cpt.parents);
  for (std::size_t r = 0; r < cpt.rows; ++r) {
    const auto row = dirichlet_row(cpt.cols, concentration, rng);
    cpt.table.insert(cpt.table.end(), row.begin(), row.end());
  }
  return cpt;
}

Cpt uniform_cpt(const PolytreeGraph& graph, const Alphabet& alphabet, Vertex v) {
  Cpt cpt;
  cpt.node = v;
  cpt.parents = graph.parents(v);
  cpt.cols = alphabet.size(v);
  cpt.rows = alphabet.table_size(cpt.parents);
  cpt.table.assign(cpt.rows * cpt.cols, 1.0 / static_cast<double>(cpt.cols));
  return cpt;
}

double min_arc_mi(const JointTable& joint, const PolytreeGraph& graph) {
  double best = std::numeric_limits<double>::infinity();
  for (const Arc& a : graph.arcs()) {
    const Vertex u[] = {a.parent};
    const Vertex v[] = {a.child};
    best = std::min(best, mutual_information(joint, u, v));
  }
  return best;
}

}  // namespace

void InstanceSpec::validate() const {
  if (n < 1) throw std::invalid_argument("instance needs at least one vertex");
  if (in_degree_bound < 1) throw std::invalid_argument("in-degree bound must be at least 1");
  if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be at least 2");
  if (!(concentration > 0.0)) throw std::invalid_argument("Dirichlet concentration must be positive");
  if (!(edge_drop_probability >= 0.0 && edge_drop_probability <= 1.0)) {
    throw std::invalid_argument("edge drop probability must lie in [0, 1]");
  }
  if (min_edge_mi && !(*min_edge_mi >= 0.0)) throw std::invalid_argument("min edge MI must be nonnegative");
}

DiscreteBayesNet random_cpts(const PolytreeGraph& graph, const Alphabet& alphabet, double concentration,
                             std::optional<double> min_mi, Rng& rng) {
  const std::size_t n = graph.vertex_count();
  std::vector<Cpt> cpts;
  if (!min_mi) {
    for (Vertex v = 0; v < n; ++v) cpts.push_back(dirichlet_cpt(graph, alphabet, v, concentration, rng));
    return DiscreteBayesNet(graph, alphabet, std::move(cpts));
  }
  alphabet.table_size();
  for (const Arc& a : graph.arcs()) {
    const double cap = std::log2(static_cast<double>(std::min(alphabet.size(a.parent), alphabet.size(a.child))));
    if (*min_mi > cap) {
      throw ResamplingExhausted("min edge MI " + std::to_string(*min_mi) + " bits exceeds the " +
                                std::to_string(cap) + " bit cap of arc " + std::to_string(a.parent) + "->" +
                                std::to_string(a.child));
    }
  }

  // The joint of v and its ancestors only depends on their CPTs, so a sweep
  // in topological order redraws each vertex until its incoming arcs pass.
  // A vertex that keeps failing (usually a skewed root above it) restarts the sweep.
  const auto order = graph.topological_order();
  Vertex worst_vertex = 0;
  double worst_best = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < kMaxCptResamples; ++sweep) {
    cpts.clear();
    for (Vertex v = 0; v < n; ++v) cpts.push_back(uniform_cpt(graph, alphabet, v));
    bool complete = true;
    for (Vertex v : order) {
      double best = -1.0;
      bool accepted = false;
      for (std::size_t attempt = 0; attempt < kVertexRedraws && !accepted; ++attempt) {
        cpts[v] = dirichlet_cpt(graph, alphabet, v, concentration, rng);
        if (graph.parents(v).empty()) {
          accepted = true;
          break;
        }
        const JointTable joint = joint_distribution(DiscreteBayesNet(graph, alphabet, cpts));
        double worst = std::numeric_limits<double>::infinity();
        for (Vertex u : graph.parents(v)) {
          const Vertex us[] = {u};
          const Vertex vs[] = {v};
          worst = std::min(worst, mutual_information(joint, us, vs));
        }
        accepted = worst >= *min_mi;
        best = std::max(best, worst);
      }
      if (!accepted) {
        if (best < worst_best) {
          worst_best = best;
          worst_vertex = v;
        }
        complete = false;
        break;
      }
    }
    if (complete) return DiscreteBayesNet(graph, alphabet, std::move(cpts));
  }
  throw ResamplingExhausted("no CPT draw reached min edge MI " + std::to_string(*min_mi) + " bits in " +
                            std::to_string(kMaxCptResamples) + " sweeps (hardest vertex " +
                            std::to_string(worst_vertex) + " with " +
                            std::to_string(graph.parents(worst_vertex).size()) + " parents, best " +
                            std::to_string(worst_best) + " bits)");
}

double min_edge_mi(const DiscreteBayesNet& bn) { return min_arc_mi(joint_distribution(bn), bn.graph()); }

DiscreteBayesNet random_polytree(const InstanceSpec& spec) {
  spec.validate();
  Rng rng = make_rng(spec.seed);
  const std::size_t n = spec.n;

  std::vector<UndirectedEdge> edges = random_tree(n, rng);
  if (spec.edge_drop_probability > 0.0) {
    std::erase_if(edges, [&](const UndirectedEdge&) { return uniform01(rng) < spec.edge_drop_probability; });
  }
  const Skeleton skeleton(n, edges);

  // Orient each component away from a random root.
  std::vector<bool> seen(n, false);
  std::vector<Vertex> vertices(n);
  std::iota(vertices.begin(), vertices.end(), 0);
  std::shuffle(vertices.begin(), vertices.end(), rng);
  std::vector<Arc> arcs;
  for (Vertex root : vertices) {
    if (seen[root]) continue;
    seen[root] = true;
    std::vector<Vertex> stack{root};
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (Vertex y : skeleton.neighbors(x)) {
        if (seen[y]) continue;
        seen[y] = true;
        arcs.push_back({x, y});
        stack.push_back(y);
      }
    }
  }

  // Flip a random subset of arcs towards their parent end while the bound allows.
  std::vector<std::size_t> in_degree(n, 0);
  for (const Arc& a : arcs) ++in_degree[a.child];
  std::vector<std::size_t> order(arcs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i : order) {
    Arc& a = arcs[i];
    if (in_degree[a.parent] + 1 > spec.in_degree_bound || uniform01(rng) >= 0.5) continue;
    --in_degree[a.child];
    ++in_degree[a.parent];
    std::swap(a.parent, a.child);
  }

  PolytreeGraph graph(n, std::move(arcs));
  const Alphabet alphabet = Alphabet::uniform(n, spec.alphabet_size);
  return random_cpts(graph, alphabet, spec.concentration, spec.min_edge_mi, rng);
}

PolytreeGraph figure1_graph() {
  enum : Vertex { a, b, c, d, e, f, g, h, i, j };
  return PolytreeGraph(10, {{a, d}, {b, d}, {c, d}, {d, f}, {e, f}, {f, g}, {e, h}, {g, i}, {j, g}});
}

DiscreteBayesNet figure1_fixture(RngSeed seed, std::optional<double> min_edge_mi) {
  Rng rng = make_rng(seed);
  return random_cpts(figure1_graph(), Alphabet::uniform(10, 2), 1.0, min_edge_mi, rng);
}

}  // namespace polylearn
