#include "polylearn/orientation.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>
#include <string>

#include "polylearn/model_io.hpp"

namespace polylearn {
namespace {

std::string edge_name(Vertex u, Vertex v) { return std::to_string(u) + "-" + std::to_string(v); }

TestRecord run_test(const TesterConfig& tester, std::vector<Vertex> a, std::vector<Vertex> b,
                    std::vector<Vertex> z, TestVerdict& verdict) {
  verdict = test_cmi(tester, a, b, z);
  return TestRecord{std::move(a), std::move(b), std::move(z), verdict.estimate, verdict.threshold};
}

// Calls `visit(subset)` for every size-k subset of `items`, lexicographically.
template <typename Visit>
void for_each_subset(const std::vector<Vertex>& items, std::size_t k, Visit&& visit) {
  if (k > items.size()) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<Vertex> subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
    visit(subset);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

void write_vertices(std::ostream& out, const std::vector<Vertex>& vs) {
  out << '[';
  for (std::size_t i = 0; i < vs.size(); ++i) out << (i ? "," : "") << vs[i];
  out << ']';
}

}  // namespace

PartialOrientation::PartialOrientation(Skeleton skeleton)
    : skeleton_(std::move(skeleton)),
      in_(skeleton_.vertex_count()),
      out_(skeleton_.vertex_count()),
      un_(skeleton_.vertex_count()) {
  for (Vertex v = 0; v < skeleton_.vertex_count(); ++v) {
    un_[v].insert(skeleton_.neighbors(v).begin(), skeleton_.neighbors(v).end());
  }
}

bool PartialOrientation::is_unoriented(Vertex u, Vertex v) const { return un_.at(v).count(u) > 0; }

void PartialOrientation::orient(Vertex u, Vertex v) {
  if (u >= vertex_count() || v >= vertex_count() || !skeleton_.adjacent(u, v)) {
    throw OrientationError("cannot orient " + edge_name(u, v) + ": not a skeleton edge");
  }
  if (!is_unoriented(u, v)) {
    throw OrientationError("cannot orient " + edge_name(u, v) + ": edge is already oriented");
  }
  in_[v].insert(u);
  un_[v].erase(u);
  out_[u].insert(v);
  un_[u].erase(v);
  assert(partition_holds());
}

bool PartialOrientation::partition_holds() const {
  for (Vertex v = 0; v < vertex_count(); ++v) {
    const auto& nbrs = skeleton_.neighbors(v);
    if (in_[v].size() + out_[v].size() + un_[v].size() != nbrs.size()) return false;
    for (Vertex u : nbrs) {
      const int memberships = static_cast<int>(in_[v].count(u) + out_[v].count(u) + un_[v].count(u));
      if (memberships != 1) return false;
      if (in_[v].count(u) != out_[u].count(v)) return false;
      if (un_[v].count(u) != un_[u].count(v)) return false;
    }
  }
  return true;
}

std::vector<Arc> PartialOrientation::oriented_arcs() const {
  std::vector<Arc> arcs;
  for (Vertex u = 0; u < vertex_count(); ++u) {
    for (Vertex v : out_[u]) arcs.push_back({u, v});
  }
  return arcs;
}

std::vector<UndirectedEdge> PartialOrientation::unoriented_edges() const {
  std::vector<UndirectedEdge> edges;
  for (Vertex u = 0; u < vertex_count(); ++u) {
    for (Vertex v : un_[u]) {
      if (u < v) edges.push_back({u, v});
    }
  }
  return edges;
}

void OrientationConfig::validate() const {
  if (in_degree_bound < 1) throw std::invalid_argument("in-degree bound d must be at least 1");
  tester.validate();
}

double per_test_epsilon(double epsilon, std::size_t n, std::size_t d) {
  if (!(epsilon > 0.0) || n == 0) throw std::invalid_argument("per-test epsilon needs epsilon > 0 and n >= 1");
  return epsilon / (2.0 * static_cast<double>(n) * static_cast<double>(d + 1));
}

PartialOrientation OrientationTrace::replay(const Skeleton& skeleton) const {
  PartialOrientation state(skeleton);
  for (const auto& e : events_) state.orient(e.u, e.v);
  return state;
}

std::string OrientationTrace::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : events_) {
    out << "{\"phase\":" << e.phase << ",\"rule\":\"" << e.rule << "\",\"u\":" << e.u << ",\"v\":" << e.v
        << ",\"tests\":[";
    for (std::size_t i = 0; i < e.tests.size(); ++i) {
      const auto& t = e.tests[i];
      out << (i ? "," : "") << "{\"vars\":{\"a\":";
      write_vertices(out, t.a);
      out << ",\"b\":";
      write_vertices(out, t.b);
      out << ",\"z\":";
      write_vertices(out, t.z);
      out << "},\"value\":" << format_real(t.value) << ",\"threshold\":" << format_real(t.threshold) << '}';
    }
    out << "]}\n";
  }
  return out.str();
}

void phase1(PartialOrientation& state, const OrientationConfig& cfg, OrientationTrace& trace) {
  const std::size_t d = cfg.in_degree_bound;
  for (std::size_t gamma = d; gamma >= 2; --gamma) {
    for (Vertex v = 0; v < state.vertex_count(); ++v) {
      std::vector<Vertex> eligible(state.incoming(v).begin(), state.incoming(v).end());
      eligible.insert(eligible.end(), state.unoriented(v).begin(), state.unoriented(v).end());
      std::sort(eligible.begin(), eligible.end());

      for_each_subset(eligible, gamma, [&](const std::vector<Vertex>& subset) {
        const auto& in = state.incoming(v);
        std::size_t fresh = 0;
        for (Vertex u : subset) fresh += in.count(u) ? 0 : 1;
        if (fresh == 0 || in.size() + fresh > d) return;

        std::vector<TestRecord> tests;
        for (Vertex u : subset) {
          std::vector<Vertex> others;
          for (Vertex w : subset) {
            if (w != u) others.push_back(w);
          }
          TestVerdict verdict;
          tests.push_back(run_test(cfg.tester, {u}, std::move(others), {v}, verdict));
          if (!verdict.is_large) return;
        }
        for (Vertex u : subset) {
          if (state.incoming(v).count(u)) continue;
          state.orient(u, v);
          trace.record({1, "v-structure", u, v, tests});
        }
      });
    }
  }
}

std::size_t phase2(PartialOrientation& state, const OrientationConfig& cfg, OrientationTrace& trace) {
  const std::size_t d = cfg.in_degree_bound;
  std::size_t passes = 0;
  bool changed = true;
  while (changed) {
    ++passes;
    changed = false;

    for (bool fired = true; fired;) {
      fired = false;
      for (Vertex v = 0; v < state.vertex_count(); ++v) {
        if (state.incoming(v).size() != d || state.unoriented(v).empty()) continue;
        const std::vector<Vertex> targets(state.unoriented(v).begin(), state.unoriented(v).end());
        for (Vertex w : targets) {
          state.orient(v, w);
          trace.record({2, "meek-r1", v, w, {}});
        }
        fired = changed = true;
      }
    }

    for (Vertex v = 0; v < state.vertex_count(); ++v) {
      const std::size_t in_degree = state.incoming(v).size();
      if (in_degree < 1 || in_degree >= d) continue;
      const std::vector<Vertex> candidates(state.unoriented(v).begin(), state.unoriented(v).end());
      for (Vertex u : candidates) {
        // Orienting into v may have used up the budget mid-sweep.
        if (state.incoming(v).size() >= d) break;
        if (!state.is_unoriented(u, v)) continue;
        const std::vector<Vertex> parents(state.incoming(v).begin(), state.incoming(v).end());
        TestVerdict given_v;
        TestRecord first = run_test(cfg.tester, {u}, parents, {v}, given_v);
        if (given_v.exceeds()) {
          state.orient(u, v);
          trace.record({2, "local-in", u, v, {std::move(first)}});
          changed = true;
          continue;
        }
        TestVerdict marginal;
        TestRecord second = run_test(cfg.tester, {u}, parents, {}, marginal);
        if (marginal.exceeds()) {
          state.orient(v, u);
          trace.record({2, "local-out", v, u, {std::move(first), std::move(second)}});
          changed = true;
        }
      }
    }
  }
  return passes;
}

PolytreeGraph phase3(PartialOrientation& state, OrientationTrace* trace) {
  const std::size_t n = state.vertex_count();
  std::vector<bool> visited(n, false);
  for (Vertex root = 0; root < n; ++root) {
    if (visited[root] || state.unoriented(root).empty()) continue;
    std::vector<Vertex> stack{root};
    visited[root] = true;
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      const std::vector<Vertex> next(state.unoriented(x).begin(), state.unoriented(x).end());
      for (auto it = next.rbegin(); it != next.rend(); ++it) {
        state.orient(x, *it);
        if (trace) trace->record({3, "free", x, *it, {}});
        visited[*it] = true;
        stack.push_back(*it);
      }
    }
  }
  return PolytreeGraph(n, state.oriented_arcs());
}

OrientationResult learn_orientation(const Skeleton& skeleton, const OrientationConfig& cfg) {
  cfg.validate();
  if (cfg.tester.variable_count() != skeleton.vertex_count()) {
    throw std::invalid_argument("tester covers " + std::to_string(cfg.tester.variable_count()) +
                                " variables, skeleton has " + std::to_string(skeleton.vertex_count()));
  }
  OrientationResult result;
  PartialOrientation state(skeleton);
  phase1(state, cfg, result.trace);
  result.phase2_passes = phase2(state, cfg, result.trace);
  result.tested_arcs = state.oriented_arcs();
  result.graph = phase3(state, &result.trace);
  return result;
}

}  // namespace polylearn
