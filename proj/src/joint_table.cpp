#include "polylearn/joint_table.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polylearn {

JointTable::JointTable(Alphabet alphabet, std::vector<double> pmf)
    : alphabet_(std::move(alphabet)), pmf_(std::move(pmf)) {
  const std::size_t expected = alphabet_.table_size();
  if (pmf_.size() != expected) {
    throw std::invalid_argument("pmf has " + std::to_string(pmf_.size()) + " entries, alphabet needs " +
                                std::to_string(expected));
  }
  double total = 0.0;
  for (double p : pmf_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("pmf entry is negative or not finite");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("pmf sums to " + std::to_string(total) + ", not 1");
  }
}

JointTable JointTable::uniform(const Alphabet& alphabet) {
  const std::size_t size = alphabet.table_size();
  return JointTable(alphabet, std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

JointTable JointTable::from_weights(Alphabet alphabet, std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("weights sum to zero");
  for (double& w : weights) w /= total;
  return JointTable(std::move(alphabet), std::move(weights));
}

std::size_t JointTable::flat_index(std::span<const std::size_t> assignment) const {
  if (assignment.size() != variable_count()) throw std::invalid_argument("assignment length mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= alphabet_.size(i)) throw std::out_of_range("symbol out of alphabet");
    flat = flat * alphabet_.size(i) + assignment[i];
  }
  return flat;
}

std::vector<std::size_t> JointTable::assignment(std::size_t flat) const {
  std::vector<std::size_t> out(variable_count());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = flat % alphabet_.size(i);
    flat /= alphabet_.size(i);
  }
  return out;
}

double JointTable::at(std::span<const std::size_t> assignment) const { return pmf_[flat_index(assignment)]; }

JointTable marginal(const JointTable& joint, std::span<const Vertex> subset) {
  const std::size_t n = joint.variable_count();
  std::vector<bool> seen(n, false);
  for (Vertex v : subset) {
    if (v >= n) throw std::out_of_range("marginal variable " + std::to_string(v) + " out of range");
    if (seen[v]) throw std::invalid_argument("marginal variable " + std::to_string(v) + " repeated");
    seen[v] = true;
  }
  const Alphabet& alphabet = joint.alphabet();
  Alphabet sub = alphabet.restrict_to(subset);
  std::vector<double> out(sub.table_size(), 0.0);

  // Stride of each full variable inside the output index (0 if summed out).
  std::vector<std::size_t> stride(n, 0);
  {
    std::size_t s = 1;
    for (std::size_t i = subset.size(); i-- > 0;) {
      stride[subset[i]] = s;
      s *= alphabet.size(subset[i]);
    }
  }

  // Odometer over full assignments, last variable fastest.
  std::vector<std::size_t> digits(n, 0);
  std::size_t target = 0;
  const auto pmf = joint.pmf();
  for (std::size_t flat = 0; flat < pmf.size(); ++flat) {
    out[target] += pmf[flat];
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < alphabet.size(i)) {
        target += stride[i];
        break;
      }
      target -= stride[i] * (digits[i] - 1);
      digits[i] = 0;
    }
  }
  return JointTable(std::move(sub), std::move(out));
}

JointTable product(const JointTable& a, const JointTable& b) {
  std::vector<std::size_t> sizes = a.alphabet().sizes();
  sizes.insert(sizes.end(), b.alphabet().sizes().begin(), b.alphabet().sizes().end());
  Alphabet alphabet(std::move(sizes));
  alphabet.table_size();
  std::vector<double> pmf;
  pmf.reserve(a.size() * b.size());
  for (double pa : a.pmf()) {
    for (double pb : b.pmf()) pmf.push_back(pa * pb);
  }
  return JointTable(std::move(alphabet), std::move(pmf));
}

}  // namespace polylearn
