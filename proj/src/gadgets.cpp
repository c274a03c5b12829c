#include "polylearn/gadgets.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "polylearn/bayes_net.hpp"
#include "polylearn/information.hpp"
#include "polylearn/model_io.hpp"

namespace polylearn {
namespace {

using namespace gadget_vars;

std::size_t flat_xzy(int x, int y, int z) { return static_cast<std::size_t>(x * 4 + z * 2 + y); }

JointTable gadget_table(double alpha, long double (*atom)(long double, int, int, int)) {
  std::vector<double> pmf(8);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int z = 0; z < 2; ++z) pmf[flat_xzy(x, y, z)] = static_cast<double>(atom(alpha, x, y, z));
    }
  }
  return JointTable(Alphabet::uniform(3, 2), std::move(pmf));
}

double kl_to_projection(const JointTable& p, const PolytreeGraph& g) {
  return kl_divergence(p, joint_distribution(project_onto(p, g)));
}

}  // namespace

long double gadget_p1_atom(long double alpha, int x, int y, int z) {
  const bool xz = x == z;
  const bool yz = y == z;
  if (xz && yz) return 3.0L / 16.0L * (1.0L + alpha);
  if (xz) return 3.0L / 16.0L * (1.0L - alpha);
  if (yz) return 1.0L / 16.0L * (1.0L + alpha);
  return 1.0L / 16.0L * (1.0L - alpha);
}

long double gadget_p2_atom(long double alpha, int x, int y, int z) {
  const bool xz = x == z;
  const bool yz = y == z;
  if (xz && yz) return 1.0L / 16.0L * (3.0L + 2.0L * alpha);
  if (xz) return 1.0L / 16.0L * (3.0L - 2.0L * alpha);
  if (yz) return 1.0L / 16.0L * (1.0L + 2.0L * alpha);
  return 1.0L / 16.0L * (1.0L - 2.0L * alpha);
}

GadgetPair build_gadget(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw std::invalid_argument("gadget alpha must lie in (0, 1/2]");
  GadgetPair g;
  g.alpha = alpha;
  g.p1 = gadget_table(alpha, gadget_p1_atom);
  g.p2 = gadget_table(alpha, gadget_p2_atom);
  g.g1 = PolytreeGraph(3, {{X, Z}, {Z, Y}});
  g.g2 = PolytreeGraph(3, {{X, Z}, {Y, Z}});
  return g;
}

GadgetReport certify_gadget(const GadgetPair& g) {
  GadgetReport r;
  r.alpha = g.alpha;
  r.h2 = hellinger_squared(g.p1, g.p2);
  r.kl_p1_g1 = kl_to_projection(g.p1, g.g1);
  r.kl_p1_g2 = kl_to_projection(g.p1, g.g2);
  r.kl_p2_g1 = kl_to_projection(g.p2, g.g1);
  r.kl_p2_g2 = kl_to_projection(g.p2, g.g2);
  const Vertex xs[] = {X};
  const Vertex ys[] = {Y};
  const Vertex zs[] = {Z};
  r.mi_p1_xy = mutual_information(g.p1, xs, ys);
  r.cmi_p2_xy_given_z = conditional_mutual_information(g.p2, xs, ys, zs);

  r.h2_within_bound = r.h2 <= g.alpha * g.alpha;
  r.h2_within_tight_bound = r.h2 <= g.alpha * g.alpha / 20.0;
  r.p1_g1_exact = r.kl_p1_g1 <= 1e-12;
  r.p2_g2_exact = r.kl_p2_g2 <= 1e-12;
  r.p1_g2_positive = r.kl_p1_g2 > 0.0;
  r.p2_g1_positive = r.kl_p2_g1 > 0.0;
  return r;
}

std::string to_json(const GadgetReport& r) {
  auto flag = [](bool b) { return b ? "true" : "false"; };
  std::ostringstream out;
  out << "{\"alpha\": " << format_real(r.alpha) << ", \"h2\": " << format_real(r.h2)
      << ", \"kl\": {\"p1g1\": " << format_real(r.kl_p1_g1) << ", \"p1g2\": " << format_real(r.kl_p1_g2)
      << ", \"p2g1\": " << format_real(r.kl_p2_g1) << ", \"p2g2\": " << format_real(r.kl_p2_g2) << "}"
      << ", \"identities\": {\"p1_mi_xy\": " << format_real(r.mi_p1_xy)
      << ", \"p2_cmi_xy_given_z\": " << format_real(r.cmi_p2_xy_given_z) << "}"
      << ", \"checks\": {\"h2_le_alpha_sq\": " << flag(r.h2_within_bound)
      << ", \"p1g1_zero\": " << flag(r.p1_g1_exact) << ", \"p2g2_zero\": " << flag(r.p2_g2_exact)
      << ", \"p1g2_positive\": " << flag(r.p1_g2_positive) << ", \"p2g1_positive\": " << flag(r.p2_g1_positive)
      << ", \"passed\": " << flag(r.passed()) << "}"
      << ", \"informational\": {\"h2_le_alpha_sq_over_20\": " << flag(r.h2_within_tight_bound) << "}"
      << ", \"units\": \"bits\"}";
  return out.str();
}

TensorGadget tensor_copies(const GadgetPair& g, std::size_t k) {
  if (k == 0) throw std::invalid_argument("need at least one gadget copy");
  Alphabet::uniform(3 * k, 2).table_size();
  TensorGadget t;
  t.copies = k;
  t.p1 = g.p1;
  t.p2 = g.p2;
  for (std::size_t i = 1; i < k; ++i) {
    t.p1 = product(t.p1, g.p1);
    t.p2 = product(t.p2, g.p2);
  }
  std::vector<Arc> arcs1, arcs2;
  for (std::size_t i = 0; i < k; ++i) {
    const Vertex base = 3 * i;
    for (const Arc& a : g.g1.arcs()) arcs1.push_back({base + a.parent, base + a.child});
    for (const Arc& a : g.g2.arcs()) arcs2.push_back({base + a.parent, base + a.child});
  }
  t.g1 = PolytreeGraph(3 * k, std::move(arcs1));
  t.g2 = PolytreeGraph(3 * k, std::move(arcs2));
  return t;
}

Dataset sample_gadget_mechanism(double alpha, int which, std::size_t m, RngSeed seed) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw std::invalid_argument("gadget alpha must lie in (0, 1/2]");
  if (which != 1 && which != 2) throw std::invalid_argument("gadget distribution must be 1 or 2");
  Rng rng = make_rng(seed);
  auto coin = [&] { return static_cast<Symbol>(rng() >> 63); };
  std::vector<Symbol> rows(3 * m);
  for (std::size_t i = 0; i < m; ++i) {
    Symbol x = coin(), y = 0, z = 0;
    if (which == 1) {
      z = uniform01(rng) < 0.5 ? x : coin();
      y = uniform01(rng) < alpha ? z : coin();
    } else {
      y = coin();
      const double u = uniform01(rng);
      z = u < 0.5 ? x : (u < 0.5 + alpha ? y : coin());
    }
    rows[3 * i + X] = x;
    rows[3 * i + Z] = z;
    rows[3 * i + Y] = y;
  }
  return Dataset(Alphabet::uniform(3, 2), std::move(rows));
}

double likelihood_ratio_error(const GadgetPair& g, std::uint64_t samples, std::size_t trials, RngSeed seed) {
  std::vector<double> log_ratio(8);
  for (std::size_t i = 0; i < 8; ++i) log_ratio[i] = std::log(g.p1[i]) - std::log(g.p2[i]);
  auto statistic = [&](const std::vector<std::uint64_t>& counts) {
    double s = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] > 0) s += static_cast<double>(counts[i]) * log_ratio[i];
    }
    return s;
  };
  Rng tie_breaker = make_rng(derive_seed(seed, 0));
  double errors = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double from_p1 = statistic(sample_counts(g.p1, samples, derive_seed(seed, 2 * t + 1)));
    const double from_p2 = statistic(sample_counts(g.p2, samples, derive_seed(seed, 2 * t + 2)));
    if (from_p1 < 0.0 || (from_p1 == 0.0 && (tie_breaker() >> 63))) errors += 1.0;
    if (from_p2 > 0.0 || (from_p2 == 0.0 && (tie_breaker() >> 63))) errors += 1.0;
  }
  return errors / (2.0 * static_cast<double>(trials));
}

std::uint64_t distinguisher_sample_size(const GadgetPair& g, double target, std::size_t trials, RngSeed seed) {
  auto passes = [&](std::uint64_t n) { return likelihood_ratio_error(g, n, trials, derive_seed(seed, n)) <= target; };
  std::uint64_t hi = 1;
  while (!passes(hi)) {
    if (hi > (std::uint64_t{1} << 40)) throw std::runtime_error("distinguisher did not reach the target error");
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;
  if (lo == 0) return hi;
  const double ratio = std::exp2(0.125);
  while (static_cast<double>(hi) > ratio * static_cast<double>(lo) && hi - lo > 1) {
    const auto mid = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(lo) * static_cast<double>(hi)));
    if (mid <= lo || mid >= hi) break;
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace polylearn
