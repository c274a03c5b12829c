#pragma once

// Small fixtures and brute-force oracles shared by the unit tests. Nothing
// here calls the library's information routines.

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "polylearn/bayes_net.hpp"
#include "polylearn/joint_table.hpp"

namespace testing_support {

using namespace polylearn;

inline Cpt make_cpt(Vertex node, std::vector<Vertex> parents, std::size_t cols,
                    std::vector<double> table) {
  Cpt c;
  c.node = node;
  c.parents = std::move(parents);
  c.cols = cols;
  c.rows = table.size() / cols;
  c.table = std::move(table);
  return c;
}

// Binary chain 0 -> 1 -> ... -> k-1, root uniform, each link flips with prob `flip`.
inline DiscreteBayesNet binary_chain(std::size_t k, double flip) {
  std::vector<Arc> arcs;
  std::vector<Cpt> cpts{make_cpt(0, {}, 2, {0.5, 0.5})};
  for (Vertex v = 1; v < k; ++v) {
    arcs.push_back({v - 1, v});
    cpts.push_back(make_cpt(v, {v - 1}, 2, {1 - flip, flip, flip, 1 - flip}));
  }
  return DiscreteBayesNet(PolytreeGraph(k, arcs), Alphabet::uniform(k, 2), std::move(cpts));
}

// u -> v <- w with v = u xor w, fair coins.
inline DiscreteBayesNet xor_collider() {
  std::vector<Cpt> cpts{make_cpt(0, {}, 2, {0.5, 0.5}),
                        make_cpt(1, {0, 2}, 2, {1, 0, 0, 1, 0, 1, 1, 0}),
                        make_cpt(2, {}, 2, {0.5, 0.5})};
  return DiscreteBayesNet(PolytreeGraph(3, {{0, 1}, {2, 1}}), Alphabet::uniform(3, 2), std::move(cpts));
}

// Decode a flat index by hand: variable 0 is the most significant digit.
inline std::vector<std::size_t> decode(std::size_t flat, const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> x(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    x[i] = flat % sizes[i];
    flat /= sizes[i];
  }
  return x;
}

// Marginal over `vars` as a map keyed by the projected assignment.
inline std::map<std::vector<std::size_t>, long double> brute_marginal(const JointTable& p,
                                                                      const std::vector<Vertex>& vars) {
  std::map<std::vector<std::size_t>, long double> out;
  const auto& sizes = p.alphabet().sizes();
  for (std::size_t f = 0; f < p.size(); ++f) {
    const auto x = decode(f, sizes);
    std::vector<std::size_t> key;
    for (Vertex v : vars) key.push_back(x[v]);
    out[key] += p[f];
  }
  return out;
}

inline long double brute_entropy(const JointTable& p, const std::vector<Vertex>& vars) {
  long double h = 0;
  for (const auto& [k, q] : brute_marginal(p, vars)) {
    if (q > 0) h -= q * std::log2(q);
  }
  return h;
}

inline std::vector<Vertex> join(std::vector<Vertex> a, const std::vector<Vertex>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// I(A;B|Z) = H(AZ) + H(BZ) - H(ABZ) - H(Z).
inline double brute_cmi(const JointTable& p, const std::vector<Vertex>& a, const std::vector<Vertex>& b,
                        const std::vector<Vertex>& z = {}) {
  return static_cast<double>(brute_entropy(p, join(a, z)) + brute_entropy(p, join(b, z)) -
                             brute_entropy(p, join(join(a, b), z)) - brute_entropy(p, z));
}

inline double brute_kl(const JointTable& p, const JointTable& q) {
  long double s = 0;
  for (std::size_t f = 0; f < p.size(); ++f) {
    if (p[f] > 0) s += p[f] * std::log2(static_cast<long double>(p[f]) / q[f]);
  }
  return static_cast<double>(s);
}

inline double binary_entropy(double p) {
  if (p <= 0 || p >= 1) return 0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace testing_support
