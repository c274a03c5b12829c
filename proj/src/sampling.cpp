#include "polylearn/sampling.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "polylearn/information.hpp"

namespace polylearn {

Dataset::Dataset(Alphabet alphabet, std::vector<Symbol> rows)
    : alphabet_(std::move(alphabet)), n_(alphabet_.variable_count()), rows_(std::move(rows)) {
  if (n_ == 0) {
    if (!rows_.empty()) throw std::invalid_argument("dataset without variables must be empty");
    return;
  }
  if (rows_.size() % n_ != 0) throw std::invalid_argument("row buffer is not a multiple of the variable count");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i] >= alphabet_.size(i % n_)) {
      throw std::invalid_argument("symbol " + std::to_string(rows_[i]) + " at row " + std::to_string(i / n_) +
                                  ", variable " + std::to_string(i % n_) + " is outside the alphabet");
    }
  }
}

Dataset forward_sample(const DiscreteBayesNet& bn, std::size_t m, RngSeed seed) {
  const std::size_t n = bn.vertex_count();
  const auto order = bn.graph().topological_order();

  std::vector<std::vector<double>> cumulative(n);
  for (Vertex v = 0; v < n; ++v) {
    const auto& table = bn.cpt(v).table;
    cumulative[v].resize(table.size());
    const std::size_t cols = bn.cpt(v).cols;
    for (std::size_t r = 0; r < bn.cpt(v).rows; ++r) {
      double acc = 0.0;
      for (std::size_t x = 0; x < cols; ++x) cumulative[v][r * cols + x] = acc += table[r * cols + x];
    }
  }

  Rng rng = make_rng(seed);
  std::vector<Symbol> rows(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    Symbol* x = rows.data() + i * n;
    for (Vertex v : order) {
      const std::size_t cols = bn.cpt(v).cols;
      const double* cum = cumulative[v].data() + bn.parent_row(v, x) * cols;
      const double u = uniform01(rng) * cum[cols - 1];
      std::size_t value = static_cast<std::size_t>(std::upper_bound(cum, cum + cols, u) - cum);
      if (value >= cols) value = cols - 1;
      x[v] = static_cast<Symbol>(value);
    }
  }
  return Dataset(bn.alphabet(), std::move(rows));
}

JointTable empirical_joint(const Dataset& data, std::span<const Vertex> subset) {
  const std::size_t m = data.row_count();
  if (m == 0) throw std::invalid_argument("empirical distribution of an empty dataset");
  const std::size_t n = data.variable_count();
  std::vector<bool> seen(n, false);
  for (Vertex v : subset) {
    if (v >= n) throw std::out_of_range("variable " + std::to_string(v) + " not in dataset");
    if (seen[v]) throw std::invalid_argument("variable " + std::to_string(v) + " repeated");
    seen[v] = true;
  }
  Alphabet sub = data.alphabet().restrict_to(subset);
  std::vector<double> counts(sub.table_size(), 0.0);
  std::vector<std::size_t> stride(subset.size());
  std::size_t s = 1;
  for (std::size_t i = subset.size(); i-- > 0;) {
    stride[i] = s;
    s *= data.alphabet().size(subset[i]);
  }
  const auto& raw = data.raw();
  for (std::size_t r = 0; r < m; ++r) {
    const Symbol* row = raw.data() + r * n;
    std::size_t flat = 0;
    for (std::size_t i = 0; i < subset.size(); ++i) flat += stride[i] * row[subset[i]];
    counts[flat] += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(m);
  for (double& c : counts) c *= inv;
  return JointTable(std::move(sub), std::move(counts));
}

double empirical_cmi(const Dataset& data, std::span<const Vertex> a, std::span<const Vertex> b,
                     std::span<const Vertex> z) {
  std::vector<Vertex> all;
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  all.insert(all.end(), z.begin(), z.end());
  std::vector<Vertex> vars = all;
  std::sort(vars.begin(), vars.end());
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
    throw std::invalid_argument("variable sets overlap");
  }
  const JointTable table = empirical_joint(data, vars);
  auto local = [&](std::span<const Vertex> set) {
    std::vector<Vertex> out;
    out.reserve(set.size());
    for (Vertex v : set) out.push_back(static_cast<Vertex>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()));
    return out;
  };
  return conditional_mutual_information(table, local(a), local(b), local(z));
}

std::vector<std::uint64_t> sample_counts(const JointTable& joint, std::uint64_t m, RngSeed seed) {
  Rng rng = make_rng(seed);
  const auto pmf = joint.pmf();
  std::vector<std::uint64_t> counts(pmf.size(), 0);
  std::size_t last = pmf.size() - 1;
  while (last > 0 && pmf[last] <= 0.0) --last;
  std::uint64_t remaining = m;
  double mass_left = 1.0;
  for (std::size_t i = 0; i <= last && remaining > 0; ++i) {
    if (i == last) {
      counts[i] = remaining;
      break;
    }
    const double q = mass_left > 0.0 ? std::clamp(pmf[i] / mass_left, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> draw(remaining, q);
    counts[i] = draw(rng);
    remaining -= counts[i];
    mass_left -= pmf[i];
  }
  return counts;
}

JointTable frequencies(const Alphabet& alphabet, std::span<const std::uint64_t> counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw std::invalid_argument("no samples");
  std::vector<double> pmf(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) pmf[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return JointTable(alphabet, std::move(pmf));
}

void write_csv(const Dataset& data, std::ostream& out) {
  const std::size_t n = data.variable_count();
  for (std::size_t v = 0; v < n; ++v) out << (v ? "," : "") << 'v' << v;
  out << '\n';
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    for (std::size_t v = 0; v < n; ++v) out << (v ? "," : "") << data(r, v);
    out << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(data, out);
}

}  // namespace polylearn
