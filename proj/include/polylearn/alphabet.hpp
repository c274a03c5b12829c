#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "polylearn/core.hpp"

namespace polylearn {

/// Per-variable cardinalities. Every size is at least 2.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::size_t> sizes);
  Alphabet(std::initializer_list<std::size_t> sizes) : Alphabet(std::vector<std::size_t>(sizes)) {}

  static Alphabet uniform(std::size_t n, std::size_t size) {
    return Alphabet(std::vector<std::size_t>(n, size));
  }

  std::size_t variable_count() const noexcept { return sizes_.size(); }
  std::size_t size(Vertex v) const { return sizes_.at(v); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  /// Product of the sizes of `vars`; throws BudgetExceeded past the dense budget.
  std::size_t table_size(std::span<const Vertex> vars) const;
  /// Product of all sizes; throws BudgetExceeded past the dense budget.
  std::size_t table_size() const;

  /// Alphabet restricted to `vars`, in the given order.
  Alphabet restrict_to(std::span<const Vertex> vars) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::size_t> sizes_;
};

}  // namespace polylearn
