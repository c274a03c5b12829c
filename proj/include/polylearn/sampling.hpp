#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <span>
#include <vector>

#include "polylearn/alphabet.hpp"
#include "polylearn/bayes_net.hpp"
#include "polylearn/joint_table.hpp"
#include "polylearn/rng.hpp"

namespace polylearn {

/// m i.i.d. rows over n discrete variables, stored row-major.
class Dataset {
 public:
  /// Throws std::invalid_argument if any symbol is outside its alphabet or the
  /// row buffer is not a multiple of n.
  Dataset(Alphabet alphabet, std::vector<Symbol> rows);

  std::size_t variable_count() const noexcept { return alphabet_.variable_count(); }
  std::size_t row_count() const noexcept { return n_ == 0 ? 0 : rows_.size() / n_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::span<const Symbol> row(std::size_t r) const { return {rows_.data() + r * n_, n_}; }
  Symbol operator()(std::size_t r, Vertex v) const { return rows_[r * n_ + v]; }
  const std::vector<Symbol>& raw() const noexcept { return rows_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Alphabet alphabet_;
  std::size_t n_ = 0;
  std::vector<Symbol> rows_;
};

/// Ancestral sampling in topological order; the same (bn, m, seed) always
/// yields the same dataset.
Dataset forward_sample(const DiscreteBayesNet& bn, std::size_t m, RngSeed seed);

/// Relative frequencies over `subset` (in the given order). Requires m >= 1.
JointTable empirical_joint(const Dataset& data, std::span<const Vertex> subset);

/// Plug-in estimate: conditional_mutual_information on empirical_joint over
/// A u B u Z. Z may be empty.
double empirical_cmi(const Dataset& data, std::span<const Vertex> a, std::span<const Vertex> b,
                     std::span<const Vertex> z);

/// Multinomial cell counts of `m` draws from `joint`, flat-indexed like the
/// table. Equivalent in distribution to tallying forward samples, but O(cells)
/// instead of O(m), which makes astronomically large m usable.
std::vector<std::uint64_t> sample_counts(const JointTable& joint, std::uint64_t m, RngSeed seed);

/// Empirical distribution from cell counts.
JointTable frequencies(const Alphabet& alphabet, std::span<const std::uint64_t> counts);

/// Header `v0,...,v{n-1}`, then one row per line.
void write_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace polylearn
