#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polylearn/alphabet.hpp"
#include "polylearn/core.hpp"

namespace polylearn {

/// Dense probability mass function over the product alphabet.
///
/// Entries are laid out row-major over the variables: variable 0 is the most
/// significant digit of the flat index. A table over zero variables is the
/// scalar 1.
class JointTable {
 public:
  /// The scalar table over zero variables.
  JointTable() : pmf_{1.0} {}
  /// Validates nonnegativity and normalization (1e-10).
  JointTable(Alphabet alphabet, std::vector<double> pmf);

  static JointTable scalar() { return JointTable(); }
  static JointTable uniform(const Alphabet& alphabet);
  /// Normalizes nonnegative weights; throws when they sum to zero.
  static JointTable from_weights(Alphabet alphabet, std::vector<double> weights);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t variable_count() const noexcept { return alphabet_.variable_count(); }
  std::span<const double> pmf() const noexcept { return pmf_; }
  std::size_t size() const noexcept { return pmf_.size(); }

  double operator[](std::size_t flat) const { return pmf_[flat]; }
  double at(std::span<const std::size_t> assignment) const;

  std::size_t flat_index(std::span<const std::size_t> assignment) const;
  std::vector<std::size_t> assignment(std::size_t flat) const;

 private:
  Alphabet alphabet_;
  std::vector<double> pmf_;
};

/// Exact marginal over `subset`, variables kept in the given order.
/// Throws std::out_of_range / std::invalid_argument on bad or repeated indices.
JointTable marginal(const JointTable& joint, std::span<const Vertex> subset);

/// Product distribution of independent blocks; variables of `a` come first.
JointTable product(const JointTable& a, const JointTable& b);

}  // namespace polylearn
