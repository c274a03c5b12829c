#include "polylearn/information.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace polylearn {
namespace {

std::vector<Vertex> sorted_copy(std::span<const Vertex> vars) {
  std::vector<Vertex> out(vars.begin(), vars.end());
  std::sort(out.begin(), out.end());
  return out;
}

void require_disjoint(const std::vector<Vertex>& a, const std::vector<Vertex>& b, const char* what) {
  std::vector<Vertex> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (!common.empty()) {
    throw std::invalid_argument(std::string("variable sets overlap (") + what + ") at variable " +
                                std::to_string(common.front()));
  }
}

std::size_t block_size(const Alphabet& alphabet, const std::vector<Vertex>& vars) {
  std::size_t s = 1;
  for (Vertex v : vars) s *= alphabet.size(v);
  return s;
}

}  // namespace

double entropy(const JointTable& table) {
  double h = 0.0;
  for (double p : table.pmf()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double mutual_information(const JointTable& joint, std::span<const Vertex> a, std::span<const Vertex> b) {
  return conditional_mutual_information(joint, a, b, {});
}

double conditional_mutual_information(const JointTable& joint, std::span<const Vertex> a,
                                      std::span<const Vertex> b, std::span<const Vertex> z) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mutual information needs nonempty sets");
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  const auto sz = sorted_copy(z);
  if (std::adjacent_find(sa.begin(), sa.end()) != sa.end() ||
      std::adjacent_find(sb.begin(), sb.end()) != sb.end() ||
      std::adjacent_find(sz.begin(), sz.end()) != sz.end()) {
    throw std::invalid_argument("variable set contains a repeated variable");
  }
  require_disjoint(sa, sb, "A, B");
  require_disjoint(sa, sz, "A, Z");
  require_disjoint(sb, sz, "B, Z");

  std::vector<Vertex> order;
  order.reserve(sa.size() + sb.size() + sz.size());
  order.insert(order.end(), sa.begin(), sa.end());
  order.insert(order.end(), sb.begin(), sb.end());
  order.insert(order.end(), sz.begin(), sz.end());
  const JointTable m = marginal(joint, order);

  const Alphabet& alphabet = joint.alphabet();
  const std::size_t na = block_size(alphabet, sa);
  const std::size_t nb = block_size(alphabet, sb);
  const std::size_t nz = block_size(alphabet, sz);

  std::vector<double> p_az(na * nz, 0.0), p_bz(nb * nz, 0.0), p_z(nz, 0.0);
  for (std::size_t ia = 0; ia < na; ++ia) {
    for (std::size_t ib = 0; ib < nb; ++ib) {
      for (std::size_t iz = 0; iz < nz; ++iz) {
        const double p = m[(ia * nb + ib) * nz + iz];
        p_az[ia * nz + iz] += p;
        p_bz[ib * nz + iz] += p;
        p_z[iz] += p;
      }
    }
  }

  double info = 0.0;
  for (std::size_t ia = 0; ia < na; ++ia) {
    for (std::size_t ib = 0; ib < nb; ++ib) {
      for (std::size_t iz = 0; iz < nz; ++iz) {
        const double p = m[(ia * nb + ib) * nz + iz];
        if (p <= 0.0) continue;
        info += p * std::log2((p * p_z[iz]) / (p_az[ia * nz + iz] * p_bz[ib * nz + iz]));
      }
    }
  }
  return std::max(info, 0.0);
}

double kl_divergence(const JointTable& p, const JointTable& q) {
  if (!(p.alphabet() == q.alphabet())) throw std::invalid_argument("KL divergence over different alphabets");
  double kl = 0.0;
  const auto pp = p.pmf();
  const auto qq = q.pmf();
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp[i] <= 0.0) continue;
    if (qq[i] <= 0.0) return kInfiniteDivergence;
    kl += pp[i] * std::log2(pp[i] / qq[i]);
  }
  return kl;
}

double hellinger_squared(const JointTable& p, const JointTable& q) {
  if (!(p.alphabet() == q.alphabet())) throw std::invalid_argument("Hellinger distance over different alphabets");
  double affinity = 0.0;
  const auto pp = p.pmf();
  const auto qq = q.pmf();
  for (std::size_t i = 0; i < pp.size(); ++i) affinity += std::sqrt(pp[i] * qq[i]);
  return std::clamp(1.0 - affinity, 0.0, 1.0);
}

}  // namespace polylearn
