#include "polylearn/param_fit.hpp"

#include <stdexcept>

namespace polylearn {

DiscreteBayesNet fit_cpts(const Dataset& data, const PolytreeGraph& graph, SmoothingRule rule) {
  if (!(rule.kappa >= 0.0)) throw std::invalid_argument("smoothing pseudo-count must be nonnegative");
  const std::size_t n = graph.vertex_count();
  if (data.variable_count() != n) throw std::invalid_argument("dataset and graph differ in variable count");
  const Alphabet& alphabet = data.alphabet();

  std::vector<Cpt> cpts(n);
  for (Vertex v = 0; v < n; ++v) {
    Cpt& cpt = cpts[v];
    cpt.node = v;
    cpt.parents = graph.parents(v);
    std::vector<Vertex> family = cpt.parents;
    family.push_back(v);
    const std::size_t cells = alphabet.table_size(family);
    cpt.cols = alphabet.size(v);
    cpt.rows = cells / cpt.cols;

    std::vector<double> counts(cells, 0.0);
    for (std::size_t r = 0; r < data.row_count(); ++r) {
      const auto row = data.row(r);
      std::size_t flat = 0;
      for (Vertex u : family) flat = flat * alphabet.size(u) + row[u];
      counts[flat] += 1.0;
    }
    cpt.table.resize(cells);
    for (std::size_t a = 0; a < cpt.rows; ++a) {
      double total = 0.0;
      for (std::size_t x = 0; x < cpt.cols; ++x) total += counts[a * cpt.cols + x];
      const double denom = total + rule.kappa * static_cast<double>(cpt.cols);
      for (std::size_t x = 0; x < cpt.cols; ++x) {
        cpt.table[a * cpt.cols + x] =
            denom > 0.0 ? (counts[a * cpt.cols + x] + rule.kappa) / denom : 1.0 / static_cast<double>(cpt.cols);
      }
    }
  }
  return DiscreteBayesNet(graph, alphabet, std::move(cpts));
}

}  // namespace polylearn
