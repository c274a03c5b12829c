#include "polylearn/bayes_net.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "polylearn/information.hpp"

namespace polylearn {

std::vector<CptViolation> find_cpt_violations(const PolytreeGraph& graph, const Alphabet& alphabet,
                                              const std::vector<Cpt>& cpts) {
  std::vector<CptViolation> out;
  const std::size_t n = graph.vertex_count();
  if (alphabet.variable_count() != n) {
    out.push_back({0, 0, "alphabet covers " + std::to_string(alphabet.variable_count()) +
                             " variables, graph has " + std::to_string(n)});
    return out;
  }
  if (cpts.size() != n) {
    out.push_back({0, 0, "expected " + std::to_string(n) + " CPTs, got " + std::to_string(cpts.size())});
    return out;
  }
  for (Vertex v = 0; v < n; ++v) {
    const Cpt& cpt = cpts[v];
    if (cpt.node != v) {
      out.push_back({v, 0, "CPT in slot " + std::to_string(v) + " is for node " + std::to_string(cpt.node)});
      continue;
    }
    if (cpt.parents != graph.parents(v)) {
      out.push_back({v, 0, "CPT parents do not match the graph"});
      continue;
    }
    std::size_t rows = 1;
    for (Vertex p : cpt.parents) rows *= alphabet.size(p);
    if (cpt.rows != rows || cpt.cols != alphabet.size(v) || cpt.table.size() != rows * cpt.cols) {
      out.push_back({v, 0, "CPT shape does not match parent count and alphabet sizes"});
      continue;
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double total = 0.0;
      bool in_range = true;
      for (double p : cpt.row(r)) {
        in_range = in_range && p >= 0.0 && p <= 1.0;
        total += p;
      }
      if (!in_range) out.push_back({v, r, "CPT entry outside [0, 1]"});
      if (!(std::abs(total - 1.0) <= 1e-12)) {
        out.push_back({v, r, "CPT row sums to " + std::to_string(total)});
      }
    }
  }
  return out;
}

DiscreteBayesNet::DiscreteBayesNet(PolytreeGraph graph, Alphabet alphabet, std::vector<Cpt> cpts)
    : graph_(std::move(graph)), alphabet_(std::move(alphabet)), cpts_(std::move(cpts)) {
  const auto violations = find_cpt_violations(graph_, alphabet_, cpts_);
  if (!violations.empty()) {
    const auto& first = violations.front();
    throw std::invalid_argument("invalid CPT for node " + std::to_string(first.node) + " row " +
                                std::to_string(first.row) + ": " + first.message);
  }
}

JointTable joint_distribution(const DiscreteBayesNet& bn) {
  const Alphabet& alphabet = bn.alphabet();
  const std::size_t size = alphabet.table_size();
  const std::size_t n = bn.vertex_count();
  std::vector<double> pmf(size);
  std::vector<std::size_t> x(n, 0);
  for (std::size_t flat = 0; flat < size; ++flat) {
    double p = 1.0;
    for (Vertex v = 0; v < n && p > 0.0; ++v) p *= bn.cpt(v)(bn.parent_row(v, x), x[v]);
    pmf[flat] = p;
    for (std::size_t i = n; i-- > 0;) {
      if (++x[i] < alphabet.size(i)) break;
      x[i] = 0;
    }
  }
  return JointTable(alphabet, std::move(pmf));
}

DiscreteBayesNet project_onto(const JointTable& p, const PolytreeGraph& g) {
  const std::size_t n = g.vertex_count();
  if (p.variable_count() != n) throw std::invalid_argument("graph and distribution differ in variable count");
  const Alphabet& alphabet = p.alphabet();
  alphabet.table_size();
  std::vector<Cpt> cpts(n);
  for (Vertex v = 0; v < n; ++v) {
    Cpt& cpt = cpts[v];
    cpt.node = v;
    cpt.parents = g.parents(v);
    std::vector<Vertex> family = cpt.parents;
    family.push_back(v);
    const JointTable fam = marginal(p, family);
    cpt.cols = alphabet.size(v);
    cpt.rows = fam.size() / cpt.cols;
    cpt.table.assign(fam.pmf().begin(), fam.pmf().end());
    for (std::size_t r = 0; r < cpt.rows; ++r) {
      double* row = cpt.table.data() + r * cpt.cols;
      double mass = 0.0;
      for (std::size_t x = 0; x < cpt.cols; ++x) mass += row[x];
      for (std::size_t x = 0; x < cpt.cols; ++x) {
        row[x] = mass > 0.0 ? row[x] / mass : 1.0 / static_cast<double>(cpt.cols);
      }
    }
  }
  return DiscreteBayesNet(g, alphabet, std::move(cpts));
}

double mi_score(const JointTable& p, const PolytreeGraph& g) {
  if (p.variable_count() != g.vertex_count()) {
    throw std::invalid_argument("graph and distribution differ in variable count");
  }
  double score = 0.0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const auto& parents = g.parents(v);
    if (parents.empty()) continue;
    const Vertex self[] = {v};
    score += mutual_information(p, self, parents);
  }
  return score;
}

}  // namespace polylearn
