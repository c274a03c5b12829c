#include "polylearn/alphabet.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace polylearn {

std::string BudgetExceeded::format_entries(double n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f", n);
  return buf;
}

Alphabet::Alphabet(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] < 2) {
      throw std::invalid_argument("alphabet size of variable " + std::to_string(i) +
                                  " must be at least 2");
    }
    if (sizes_[i] > 65535) {
      throw std::invalid_argument("alphabet size of variable " + std::to_string(i) +
                                  " exceeds the 16-bit symbol range");
    }
  }
}

std::size_t Alphabet::table_size(std::span<const Vertex> vars) const {
  double required = 1.0;
  for (Vertex v : vars) required *= static_cast<double>(size(v));
  if (required > static_cast<double>(kDenseTableBudget)) {
    throw BudgetExceeded("dense table over " + std::to_string(vars.size()) + " variables", required);
  }
  std::size_t entries = 1;
  for (Vertex v : vars) entries *= size(v);
  return entries;
}

std::size_t Alphabet::table_size() const {
  std::vector<Vertex> all(sizes_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return table_size(all);
}

Alphabet Alphabet::restrict_to(std::span<const Vertex> vars) const {
  std::vector<std::size_t> sizes;
  sizes.reserve(vars.size());
  for (Vertex v : vars) sizes.push_back(size(v));
  return Alphabet(std::move(sizes));
}

}  // namespace polylearn
