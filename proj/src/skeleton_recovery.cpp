#include "polylearn/skeleton_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "polylearn/information.hpp"
#include "polylearn/model_io.hpp"

namespace polylearn {

MiMatrix pairwise_mi(const Dataset& data) {
  const std::size_t n = data.variable_count();
  MiMatrix mi(n);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      const Vertex a[] = {u};
      const Vertex b[] = {v};
      mi.set(u, v, empirical_cmi(data, a, b, {}));
    }
  }
  return mi;
}

MiMatrix pairwise_mi(const JointTable& joint) {
  const std::size_t n = joint.variable_count();
  MiMatrix mi(n);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      const Vertex a[] = {u};
      const Vertex b[] = {v};
      mi.set(u, v, mutual_information(joint, a, b));
    }
  }
  return mi;
}

Skeleton chow_liu_skeleton(const MiMatrix& mi, std::optional<double> prune_below) {
  const std::size_t n = mi.size();
  struct Candidate {
    double weight;
    Vertex u, v;
  };
  std::vector<Candidate> candidates;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      if (prune_below && mi(u, v) < *prune_below) continue;
      candidates.push_back({mi(u, v), u, v});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });

  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  std::vector<UndirectedEdge> edges;
  for (const auto& c : candidates) {
    const auto ru = find(c.u);
    const auto rv = find(c.v);
    if (ru == rv) continue;
    root[std::max(ru, rv)] = std::min(ru, rv);
    edges.push_back({c.u, c.v});
    if (edges.size() + 1 == n) break;
  }
  return Skeleton(n, std::move(edges));
}

GapReport check_assumption(const JointTable& joint, const PolytreeGraph& g_star) {
  const std::size_t n = g_star.vertex_count();
  if (joint.variable_count() != n) throw std::invalid_argument("graph and distribution differ in variable count");
  joint.alphabet().table_size();
  const Skeleton skel = g_star.skeleton();
  const MiMatrix mi = pairwise_mi(joint);

  GapReport report;
  if (skel.edges().empty()) {
    report.epsilon_p = std::numeric_limits<double>::infinity();
    report.raw_minimum = report.epsilon_p;
    report.satisfied = true;
    return report;
  }

  double best = std::numeric_limits<double>::infinity();
  GapWitness witness;
  for (const auto& e : skel.edges()) {
    if (mi(e.u, e.v) < best) {
      best = mi(e.u, e.v);
      witness = {e.u, e.v, e.u, e.v};
    }
  }
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      const auto path = skel.path(u, v);
      if (path.size() < 3) continue;  // adjacent or disconnected
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double gap = mi(path[i], path[i + 1]) - mi(u, v);
        if (gap < best) {
          best = gap;
          const auto edge = make_edge(path[i], path[i + 1]);
          witness = {u, v, edge.u, edge.v};
        }
      }
    }
  }
  report.raw_minimum = best;
  report.satisfied = best > 0.0;
  report.epsilon_p = std::max(best, 0.0);
  if (!report.satisfied) report.witness = witness;
  return report;
}

std::string to_json(const GapReport& report) {
  std::ostringstream out;
  const bool infinite = std::isinf(report.epsilon_p);
  out << "{\"epsilon_p\": " << (infinite ? std::string("null") : format_real(report.epsilon_p))
      << ", \"epsilon_p_infinite\": " << (infinite ? "true" : "false")
      << ", \"raw_minimum\": " << (std::isinf(report.raw_minimum) ? std::string("null") : format_real(report.raw_minimum))
      << ", \"satisfied\": " << (report.satisfied ? "true" : "false") << ", \"witness\": ";
  if (report.witness) {
    const auto& w = *report.witness;
    out << "{\"pair\": [" << w.u << ", " << w.v << "], \"edge\": [" << w.edge_a << ", " << w.edge_b << "]}";
  } else {
    out << "null";
  }
  out << ", \"units\": \"bits\"}";
  return out.str();
}

void write_edge_list(const Skeleton& skeleton, std::ostream& out) {
  for (const auto& e : skeleton.edges()) out << e.u << ' ' << e.v << '\n';
}

Skeleton read_edge_list(std::size_t n, std::istream& in) {
  std::vector<UndirectedEdge> edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    Vertex u = 0, v = 0;
    if (!(fields >> u >> v)) throw std::invalid_argument("malformed edge line: " + line);
    edges.push_back(make_edge(u, v));
  }
  return Skeleton(n, std::move(edges));
}

}  // namespace polylearn
