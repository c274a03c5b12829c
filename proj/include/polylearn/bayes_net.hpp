#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "polylearn/alphabet.hpp"
#include "polylearn/graph.hpp"
#include "polylearn/joint_table.hpp"

namespace polylearn {

/// P(node = x | parents = a), stored row-major: one row per parent
/// configuration, one column per value of the node. The configuration index
/// is row-major over `parents`, which are sorted ascending.
struct Cpt {
  Vertex node = 0;
  std::vector<Vertex> parents;
  std::size_t rows = 1;
  std::size_t cols = 0;
  std::vector<double> table;

  double operator()(std::size_t row, std::size_t value) const { return table[row * cols + value]; }
  std::span<const double> row(std::size_t r) const { return {table.data() + r * cols, cols}; }
};

/// Describes why a set of CPTs cannot form a valid network.
struct CptViolation {
  Vertex node;
  std::size_t row;
  std::string message;
};

/// Every CPT problem found: shape mismatches, entries outside [0,1], rows
/// whose sum is off by more than 1e-12.
std::vector<CptViolation> find_cpt_violations(const PolytreeGraph& graph, const Alphabet& alphabet,
                                              const std::vector<Cpt>& cpts);

class DiscreteBayesNet {
 public:
  /// Throws std::invalid_argument listing the first violation, if any.
  DiscreteBayesNet(PolytreeGraph graph, Alphabet alphabet, std::vector<Cpt> cpts);

  const PolytreeGraph& graph() const noexcept { return graph_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
  const Cpt& cpt(Vertex v) const { return cpts_.at(v); }
  std::size_t vertex_count() const noexcept { return graph_.vertex_count(); }

  /// Row index of the parent configuration of `v` inside a full assignment.
  template <typename Assignment>
  std::size_t parent_row(Vertex v, const Assignment& x) const {
    std::size_t row = 0;
    for (Vertex p : cpts_[v].parents) row = row * alphabet_.size(p) + static_cast<std::size_t>(x[p]);
    return row;
  }

 private:
  PolytreeGraph graph_;
  Alphabet alphabet_;
  std::vector<Cpt> cpts_;  // indexed by node
};

/// Dense joint pmf(x) = prod_v P(x_v | x_parents(v)).
JointTable joint_distribution(const DiscreteBayesNet& bn);

/// The KL-closest distribution to P factorizing over G: P's own conditionals
/// along G's parent sets. Parent configurations with zero probability get a
/// uniform row.
DiscreteBayesNet project_onto(const JointTable& p, const PolytreeGraph& g);

/// sum_v I(v; parents_G(v)) under P, bits.
double mi_score(const JointTable& p, const PolytreeGraph& g);

}  // namespace polylearn
