#include "polylearn/property_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "polylearn/bayes_net.hpp"
#include "polylearn/ci_tester.hpp"
#include "polylearn/gadgets.hpp"
#include "polylearn/information.hpp"
#include "polylearn/instance_gen.hpp"
#include "polylearn/model_io.hpp"
#include "polylearn/orientation.hpp"
#include "polylearn/param_fit.hpp"
#include "polylearn/pipeline.hpp"
#include "polylearn/sampling.hpp"
#include "polylearn/skeleton_recovery.hpp"

namespace polylearn {
namespace {

using Check = std::function<CheckResult(RngSeed, const PropertySuiteOptions&)>;

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {  // inclusive
  return lo + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
}

JointTable random_joint(Rng& rng, std::size_t n, std::size_t max_card) {
  std::vector<std::size_t> sizes(n);
  for (auto& s : sizes) s = pick(rng, 2, max_card);
  Alphabet alphabet(sizes);
  std::vector<double> w(alphabet.table_size());
  // Cube of a uniform gives skewed tables with some near-zero atoms.
  for (auto& x : w) x = std::pow(uniform01(rng), 3.0);
  return JointTable::from_weights(alphabet, std::move(w));
}

PolytreeGraph random_orientation(const Skeleton& skel, Rng& rng) {
  std::vector<Arc> arcs;
  for (const auto& e : skel.edges()) {
    arcs.push_back((rng() >> 63) ? Arc{e.u, e.v} : Arc{e.v, e.u});
  }
  return PolytreeGraph(skel.vertex_count(), std::move(arcs));
}

DiscreteBayesNet instance(RngSeed seed, std::size_t n, std::size_t d, std::optional<double> min_mi = 0.01,
                          double concentration = 1.0) {
  InstanceSpec spec;
  spec.n = n;
  spec.in_degree_bound = d;
  spec.min_edge_mi = min_mi;
  spec.concentration = concentration;
  spec.seed = seed;
  return random_polytree(spec);
}

// Random polytree whose CPTs clear min_mi; redraws the graph when they cannot.
DiscreteBayesNet sturdy_instance(RngSeed seed, std::size_t n, std::size_t d, double min_mi) {
  for (std::uint64_t k = 0;; ++k) {
    try {
      return instance(derive_seed(seed, k), n, d, min_mi);
    } catch (const ResamplingExhausted&) {
    }
  }
}

// Every subset of `pool` split into (A, B), both nonempty, A containing the first chosen member.
std::vector<std::pair<std::vector<Vertex>, std::vector<Vertex>>> splits(const std::vector<Vertex>& pool) {
  std::vector<std::pair<std::vector<Vertex>, std::vector<Vertex>>> out;
  const std::size_t k = pool.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
    for (std::size_t sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
      std::vector<Vertex> a, b;
      for (std::size_t i = 0; i < k; ++i) {
        if (sub >> i & 1) a.push_back(pool[i]);
        else if (mask >> i & 1) b.push_back(pool[i]);
      }
      if (a.front() < b.front()) out.emplace_back(a, b);
    }
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<Vertex> join(std::vector<Vertex> a, const std::vector<Vertex>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

std::string fmt(double x) { return format_real(x); }

// Independent checks. Each returns passed/cases/detail; timing is added by the runner.

CheckResult cpt_row_sums(RngSeed seed, const PropertySuiteOptions& opt) {
  CheckResult r;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto bn = instance(derive_seed(seed, i), 2 + i % 7, 3, std::nullopt);
    auto cpts = bn.cpts();
    if (opt.corrupt_cpt_row && i == 0) {
      Cpt& c = cpts[0];
      for (std::size_t x = 0; x < c.cols; ++x) c.table[x] *= 0.9;
    }
    const auto violations = find_cpt_violations(bn.graph(), bn.alphabet(), cpts);
    if (!violations.empty()) {
      ++bad;
      if (r.detail.empty()) {
        r.detail = "instance " + std::to_string(i) + " vertex " + std::to_string(violations[0].node) + ": " +
                   violations[0].message;
      }
    }
    ++r.cases;
  }
  r.passed = bad == 0;
  return r;
}

CheckResult marginal_consistency(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto p = random_joint(rng, pick(rng, 2, 5), 3);
    const std::size_t n = p.variable_count();
    std::vector<Vertex> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t k = pick(rng, 1, n);
    const std::vector<Vertex> outer(all.begin(), all.begin() + static_cast<long>(k));
    const std::size_t j = pick(rng, 1, k);
    std::vector<Vertex> inner_local(k);
    std::iota(inner_local.begin(), inner_local.end(), 0);
    std::shuffle(inner_local.begin(), inner_local.end(), rng);
    inner_local.resize(j);
    std::vector<Vertex> inner_global;
    for (Vertex x : inner_local) inner_global.push_back(outer[x]);
    const auto two_step = marginal(marginal(p, outer), inner_local);
    const auto direct = marginal(p, inner_global);
    double total = 0.0;
    for (std::size_t f = 0; f < direct.size(); ++f) {
      worst = std::max(worst, std::abs(two_step[f] - direct[f]));
      total += direct[f];
    }
    worst = std::max(worst, std::abs(total - 1.0));
    ++r.cases;
  }
  r.passed = worst <= 1e-12;
  r.detail = "max deviation " + fmt(worst);
  return r;
}

CheckResult kl_score_identity(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(derive_seed(seed, 1000));
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto bn = instance(derive_seed(seed, i), pick(rng, 2, 8), pick(rng, 1, 3), std::nullopt);
    const auto p = joint_distribution(bn);
    const double star = mi_score(p, bn.graph());
    for (int k = 0; k < 5; ++k) {
      const auto g = random_orientation(bn.graph().skeleton(), rng);
      const double direct = kl_divergence(p, joint_distribution(project_onto(p, g)));
      worst = std::max(worst, std::abs(direct - (star - mi_score(p, g))));
      ++r.cases;
    }
  }
  r.passed = worst <= 1e-9;
  r.detail = "max residual " + fmt(worst) + " bits";
  return r;
}

CheckResult chain_rule_identity(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(seed);
  double worst = 0.0;
  while (r.cases < 200) {
    const auto p = random_joint(rng, pick(rng, 3, 5), 3);
    const std::size_t n = p.variable_count();
    std::vector<Vertex> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const Vertex v[] = {all[0]};
    const std::size_t na = pick(rng, 1, n - 2);
    const std::size_t nb = pick(rng, 1, n - 1 - na);
    std::vector<Vertex> a(all.begin() + 1, all.begin() + 1 + static_cast<long>(na));
    std::vector<Vertex> b(all.begin() + 1 + static_cast<long>(na), all.begin() + 1 + static_cast<long>(na + nb));
    const auto ab = join(a, b);
    const double lhs = mutual_information(p, v, ab);
    const double rhs = mutual_information(p, v, a) + mutual_information(p, v, b) +
                       conditional_mutual_information(p, a, b, v) - mutual_information(p, a, b);
    worst = std::max(worst, std::abs(lhs - rhs));
    ++r.cases;
  }
  r.passed = worst <= 1e-9;
  r.detail = std::to_string(r.cases) + " cases, max residual " + fmt(worst) + " bits";
  return r;
}

CheckResult parent_identity(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  double worst_identity = 0.0;
  double worst_super = 0.0;  // most negative I(v;A) - sum I(v;u)
  std::size_t instances = 0;
  for (std::uint64_t k = 0; instances < 100; ++k) {
    const auto bn = instance(derive_seed(seed, k), 4 + k % 5, 3, std::nullopt);
    if (bn.graph().max_in_degree() < 2) continue;
    ++instances;
    const auto p = joint_distribution(bn);
    for (Vertex v = 0; v < bn.vertex_count(); ++v) {
      const auto& parents = bn.graph().parents(v);
      if (parents.size() < 2) continue;
      const Vertex vs[] = {v};
      for (const auto& [a, b] : splits(parents)) {
        const double lhs = mutual_information(p, vs, join(a, b));
        const double rhs = mutual_information(p, vs, a) + mutual_information(p, vs, b) +
                           conditional_mutual_information(p, a, b, vs);
        worst_identity = std::max(worst_identity, std::abs(lhs - rhs));
        for (const auto& set : {a, join(a, b)}) {
          double sum = 0.0;
          for (Vertex u : set) {
            const Vertex us[] = {u};
            sum += mutual_information(p, vs, us);
          }
          worst_super = std::min(worst_super, mutual_information(p, vs, set) - sum);
        }
        ++r.cases;
      }
    }
  }
  r.passed = worst_identity <= 1e-9 && worst_super >= -1e-9;
  r.detail = "100 instances, identity residual " + fmt(worst_identity) + ", superadditivity slack " +
             fmt(worst_super);
  return r;
}

CheckResult nonnegativity(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(seed);
  double lowest = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto p = random_joint(rng, pick(rng, 3, 5), 3);
    const std::size_t n = p.variable_count();
    std::vector<Vertex> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const Vertex a[] = {all[0]};
    const Vertex b[] = {all[1]};
    const Vertex z[] = {all[2]};
    lowest = std::min({lowest, mutual_information(p, a, b), conditional_mutual_information(p, a, b, z)});
    std::vector<double> w(p.size());
    for (auto& x : w) x = uniform01(rng) + 1e-3;
    lowest = std::min(lowest, kl_divergence(p, JointTable::from_weights(p.alphabet(), w)));
    lowest = std::min(lowest, kl_divergence(p, p));
    r.cases += 4;
  }
  r.passed = lowest >= -1e-12;
  r.detail = "lowest value " + fmt(lowest);
  return r;
}

CheckResult projection_optimality(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(derive_seed(seed, 77));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 10; ++i) {
    const auto truth = instance(derive_seed(seed, i), pick(rng, 3, 7), 3, std::nullopt);
    const auto p = joint_distribution(truth);
    const auto g = random_orientation(truth.graph().skeleton(), rng);
    const double best = kl_divergence(p, joint_distribution(project_onto(p, g)));
    for (int k = 0; k < 20; ++k) {
      std::optional<double> none;
      Rng cpt_rng = make_rng(derive_seed(seed, 1000 * (i + 1) + static_cast<std::uint64_t>(k)));
      auto q = random_cpts(g, p.alphabet(), 1.0, none, cpt_rng);
      if (k % 2 == 1) {
        // Small perturbation of the projection itself.
        const auto proj = project_onto(p, g);
        auto cpts = q.cpts();
        for (Vertex v = 0; v < cpts.size(); ++v) {
          for (std::size_t e = 0; e < cpts[v].table.size(); ++e) {
            cpts[v].table[e] = 0.99 * proj.cpt(v).table[e] + 0.01 * cpts[v].table[e];
          }
        }
        q = DiscreteBayesNet(g, p.alphabet(), std::move(cpts));
      }
      worst = std::min(worst, kl_divergence(p, joint_distribution(q)) - best);
      ++r.cases;
    }
  }
  r.passed = worst >= -1e-9;
  r.detail = "smallest KL(P||Q) - KL(P||P_G) " + fmt(worst);
  return r;
}

CheckResult plugin_factorization(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(seed);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto bn = instance(derive_seed(seed, i), pick(rng, 3, 6), 3, std::nullopt);
    const auto data = forward_sample(bn, pick(rng, 1, 2000), derive_seed(seed, 500 + i));
    std::vector<Vertex> all(bn.vertex_count());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t na = pick(rng, 1, all.size() - 1);
    const std::size_t nb = pick(rng, 1, all.size() - na);
    std::vector<Vertex> a(all.begin(), all.begin() + static_cast<long>(na));
    std::vector<Vertex> b(all.begin() + static_cast<long>(na), all.begin() + static_cast<long>(na + nb));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto u = join(a, b);
    std::vector<Vertex> la, lb;
    for (std::size_t j = 0; j < u.size(); ++j) {
      (std::binary_search(a.begin(), a.end(), u[j]) ? la : lb).push_back(j);
    }
    const double direct = empirical_cmi(data, a, b, {});
    const double via_table = mutual_information(empirical_joint(data, u), la, lb);
    if (direct != via_table) ++mismatches;
    ++r.cases;
  }
  r.passed = mismatches == 0;
  r.detail = std::to_string(mismatches) + " bitwise mismatches";
  return r;
}

CheckResult sampling_determinism(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  std::size_t differ = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto bn = instance(derive_seed(seed, i), 5, 3, std::nullopt);
    const auto s = derive_seed(seed, 100 + i);
    if (!(forward_sample(bn, 500, s) == forward_sample(bn, 500, s))) ++differ;
    if (sample_counts(joint_distribution(bn), 100000, s) != sample_counts(joint_distribution(bn), 100000, s)) {
      ++differ;
    }
    r.cases += 2;
  }
  r.passed = differ == 0;
  r.detail = std::to_string(differ) + " differing repeats";
  return r;
}

CheckResult sampling_concentration(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  const auto bn = sturdy_instance(seed, 5, 2, 0.05);
  const auto p = joint_distribution(bn);
  const Arc arc = bn.graph().arcs().front();
  const Vertex a[] = {arc.parent};
  const Vertex b[] = {arc.child};
  const double exact = mutual_information(p, a, b);
  std::vector<double> medians;
  for (std::uint64_t m : {1000, 10000, 100000}) {
    std::vector<double> err;
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto data = forward_sample(bn, m, derive_seed(seed, m * 100 + s));
      err.push_back(std::abs(empirical_cmi(data, a, b, {}) - exact));
      ++r.cases;
    }
    medians.push_back(median(err));
  }
  std::size_t inversions = 0;
  bool small = true;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (medians[i] > medians[i - 1]) {
      ++inversions;
      small = small && medians[i] <= 1.1 * medians[i - 1];
    }
  }
  r.passed = inversions <= 1 && small;
  r.detail = "median |I_hat - I| " + fmt(medians[0]) + ", " + fmt(medians[1]) + ", " + fmt(medians[2]);
  return r;
}

CheckResult tester_consistency(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(seed);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto bn = instance(derive_seed(seed, i), 4, 3, std::nullopt);
    const auto data = forward_sample(bn, 300, derive_seed(seed, 1000 + i));
    const auto cfg = empirical_tester(data, 0.05 * uniform01(rng) + 1e-4, 0.1, 0.25);
    const Vertex a[] = {0}, b[] = {1}, z[] = {2, 3};
    const auto v1 = test_cmi(cfg, a, b, z);
    const auto v2 = test_cmi(cfg, a, b, z);
    if (v1.is_large != (v1.estimate >= v1.threshold)) ++bad;
    if (v1.estimate != v2.estimate || v1.is_large != v2.is_large || v1.threshold != v2.threshold) ++bad;
    ++r.cases;
  }
  r.passed = bad == 0;
  r.detail = std::to_string(bad) + " inconsistent verdicts";
  return r;
}

CheckResult tester_oracle_soundness(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(seed);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto bn = instance(derive_seed(seed, i), 6, 3, std::nullopt);
    const auto p = joint_distribution(bn);
    const auto cfg = oracle_tester(p, 1e-6, 0.5);
    for (int k = 0; k < 5; ++k) {
      std::vector<Vertex> all(6);
      std::iota(all.begin(), all.end(), 0);
      std::shuffle(all.begin(), all.end(), rng);
      const Vertex a[] = {all[0]}, b[] = {all[1]}, z[] = {all[2]};
      const auto v = test_cmi(cfg, a, b, z);
      if (v.is_large && !(conditional_mutual_information(p, a, b, z) > 0.0)) ++bad;
      ++r.cases;
    }
  }
  r.passed = bad == 0;
  r.detail = std::to_string(bad) + " large verdicts on zero CMI";
  return r;
}

CheckResult tester_calibration(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  const double eps = 0.1, delta = 0.1;
  const std::uint64_t n = required_sample_size(2, 2, 1, eps, delta);
  // X independent of Y, skewed marginals.
  const JointTable p(Alphabet::uniform(2, 2), {0.7 * 0.4, 0.7 * 0.6, 0.3 * 0.4, 0.3 * 0.6});
  std::size_t large = 0;
  double highest = 0.0;
  for (std::size_t t = 0; t < 200; ++t) {
    const auto counts = sample_counts(p, n, derive_seed(seed, t));
    TesterConfig cfg;
    cfg.epsilon = eps;
    cfg.delta = delta;
    cfg.source = FrequencySource{std::make_shared<const JointTable>(frequencies(p.alphabet(), counts)), n};
    const Vertex a[] = {0}, b[] = {1};
    const auto v = test_cmi(cfg, a, b, {});
    highest = std::max(highest, v.estimate);
    if (v.is_large) ++large;
    ++r.cases;
  }
  const double rate = static_cast<double>(large) / 200.0;
  r.passed = rate <= delta;
  r.detail = "N=" + std::to_string(n) + ", false-large rate " + fmt(rate) + ", largest estimate " + fmt(highest) +
             " vs threshold " + fmt(kDefaultTesterConstant * eps);
  return r;
}

struct OracleRun {
  DiscreteBayesNet truth;
  JointTable joint;
  OrientationResult result;
};

std::vector<OracleRun> oracle_runs(RngSeed seed, std::size_t count) {
  std::vector<OracleRun> runs;
  for (std::size_t i = 0; i < count; ++i) {
    auto truth = sturdy_instance(derive_seed(seed, i), 4 + i % 7, 3, 0.02);
    auto joint = joint_distribution(truth);
    OrientationConfig cfg;
    cfg.in_degree_bound = 3;
    cfg.tester = oracle_tester(joint, 1e-9);
    auto result = learn_orientation(truth.graph().skeleton(), cfg);
    runs.push_back({std::move(truth), std::move(joint), std::move(result)});
  }
  return runs;
}

CheckResult orientation_partition(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  std::size_t bad = 0;
  for (const auto& run : oracle_runs(seed, 30)) {
    PartialOrientation state(run.truth.graph().skeleton());
    std::size_t oriented = 0;
    for (const auto& e : run.result.trace.events()) {
      state.orient(e.u, e.v);
      const std::size_t now = state.oriented_arcs().size();
      if (!state.partition_holds() || now != oriented + 1) ++bad;
      oriented = now;
      ++r.cases;
    }
  }
  r.passed = bad == 0;
  r.detail = std::to_string(bad) + " steps broke the partition or shrank the oriented set";
  return r;
}

CheckResult orientation_oracle(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  std::size_t unsound = 0, over_bound = 0, phase3_degree = 0, passes = 0;
  double worst_gap = 0.0;
  for (const auto& run : oracle_runs(seed, 100)) {
    const auto& g_star = run.truth.graph();
    const std::size_t n = g_star.vertex_count();
    // Arcs fixed by phases 1-2, completed with ground-truth directions.
    std::vector<Arc> arcs = run.result.tested_arcs;
    for (const Arc& a : g_star.arcs()) {
      const bool fixed = std::any_of(arcs.begin(), arcs.end(), [&](const Arc& b) {
        return (b.parent == a.parent && b.child == a.child) || (b.parent == a.child && b.child == a.parent);
      });
      if (!fixed) arcs.push_back(a);
    }
    const PolytreeGraph completed(n, arcs);
    if (kl_divergence(run.joint, joint_distribution(project_onto(run.joint, completed))) > 1e-9) ++unsound;

    const double gap = mi_score(run.joint, g_star) - mi_score(run.joint, run.result.graph);
    worst_gap = std::max(worst_gap, gap);
    if (gap > static_cast<double>(n * (g_star.max_in_degree() + 1)) * 1e-9 + 1e-9) ++over_bound;

    std::vector<std::size_t> h_in(n, 0);
    for (const auto& e : run.result.trace.events()) {
      if (e.phase == 3 && ++h_in[e.v] > 1) ++phase3_degree;
    }
    if (run.result.phase2_passes > g_star.arc_count() + 1) ++passes;
    ++r.cases;
  }
  r.passed = unsound + over_bound + phase3_degree + passes == 0;
  r.detail = "unsound " + std::to_string(unsound) + ", over score bound " + std::to_string(over_bound) +
             " (worst gap " + fmt(worst_gap) + "), phase-3 in-degree > 1: " + std::to_string(phase3_degree) +
             ", phase-2 pass overruns " + std::to_string(passes);
  return r;
}

// Maximum spanning tree weight by Prim, for comparison with Kruskal.
double prim_weight(const MiMatrix& mi) {
  const std::size_t n = mi.size();
  std::vector<bool> in(n, false);
  std::vector<double> key(n, -std::numeric_limits<double>::infinity());
  key[0] = 0.0;
  double total = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in[v] && (u == n || key[v] > key[u])) u = v;
    }
    in[u] = true;
    total += key[u];
    for (std::size_t v = 0; v < n; ++v) {
      if (!in[v]) key[v] = std::max(key[v], mi(u, v));
    }
  }
  return total;
}

CheckResult chow_liu_properties(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(seed);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const std::size_t n = pick(rng, 1, 12);
    MiMatrix mi(n);
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) mi.set(u, v, std::floor(uniform01(rng) * 8.0) / 8.0 + 1e-3);
    }
    const Skeleton s1 = chow_liu_skeleton(mi);
    const Skeleton s2 = chow_liu_skeleton(mi);
    double weight = 0.0;
    for (const auto& e : s1.edges()) weight += mi(e.u, e.v);
    if (!(s1 == s2) || s1.edges().size() + 1 != n || std::abs(weight - prim_weight(mi)) > 1e-12) ++bad;
    ++r.cases;
  }
  r.passed = bad == 0;
  r.detail = std::to_string(bad) + " non-spanning, non-maximal or nondeterministic outputs";
  return r;
}

DiscreteBayesNet chain_instance(RngSeed seed, std::size_t n, double min_mi) {
  Rng rng = make_rng(seed);
  std::vector<UndirectedEdge> edges;
  for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
  const auto g = random_orientation(Skeleton(n, edges), rng);
  return random_cpts(g, Alphabet::uniform(n, 2), 1.0, min_mi, rng);
}

CheckResult skeleton_recovery(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  std::ostringstream detail;
  bool ok = true;
  for (int cls = 0; cls < 2; ++cls) {
    std::size_t found = 0, hits = 0, trials = 0;
    for (std::uint64_t k = 0; found < 25; ++k) {
      const RngSeed s = derive_seed(seed, static_cast<std::uint64_t>(cls) * 1000000 + k);
      DiscreteBayesNet bn = [&] {
        if (cls == 0) return chain_instance(s, 6, 0.05);
        return instance(s, 6, 3, 0.05);
      }();
      const auto p = joint_distribution(bn);
      const auto gap = check_assumption(p, bn.graph());
      if (!(gap.epsilon_p >= 0.05) || std::isinf(gap.epsilon_p)) continue;
      ++found;
      const auto m = static_cast<std::size_t>(std::ceil(100.0 * std::log(6.0) / (gap.epsilon_p * gap.epsilon_p)));
      for (std::uint64_t t = 0; t < 4; ++t) {
        const auto data = forward_sample(bn, m, derive_seed(s, 10 + t));
        if (chow_liu_skeleton(pairwise_mi(data)) == bn.graph().skeleton()) ++hits;
        ++trials;
        ++r.cases;
      }
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(trials);
    ok = ok && rate >= 0.95;
    detail << (cls == 0 ? "chains " : ", trees ") << hits << "/" << trials;
  }
  r.passed = ok;
  r.detail = detail.str();
  return r;
}

CheckResult fit_properties(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  Rng rng = make_rng(seed);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    const auto bn = instance(derive_seed(seed, i), pick(rng, 2, 7), 3, std::nullopt);
    const auto data = forward_sample(bn, pick(rng, 1, 400), derive_seed(seed, 100 + i));
    for (double kappa : {0.0, 0.5, 1.0}) {
      const auto fit = fit_cpts(data, bn.graph(), SmoothingRule{kappa});
      for (const Cpt& c : fit.cpts()) {
        for (std::size_t a = 0; a < c.rows; ++a) {
          double s = 0.0;
          for (double x : c.row(a)) s += x;
          if (std::abs(s - 1.0) > 1e-12) ++bad;
        }
      }
      if (kappa != 0.0) continue;
      // Plug-in conditionals straight from raw counts.
      for (const Cpt& c : fit.cpts()) {
        std::vector<double> counts(c.rows * c.cols, 0.0);
        for (std::size_t row = 0; row < data.row_count(); ++row) {
          std::size_t cfg = 0;
          for (Vertex u : c.parents) cfg = cfg * data.alphabet().size(u) + data(row, u);
          counts[cfg * c.cols + data(row, c.node)] += 1.0;
        }
        for (std::size_t a = 0; a < c.rows; ++a) {
          double t = 0.0;
          for (std::size_t x = 0; x < c.cols; ++x) t += counts[a * c.cols + x];
          if (t == 0.0) continue;
          for (std::size_t x = 0; x < c.cols; ++x) {
            if (c(a, x) != counts[a * c.cols + x] / t) ++bad;
          }
        }
      }
    }
    ++r.cases;
  }
  r.passed = bad == 0;
  r.detail = std::to_string(bad) + " bad rows or plug-in mismatches";
  return r;
}

CheckResult fit_kl_decreases(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  const auto bn = sturdy_instance(seed, 6, 3, 0.02);
  const auto p = joint_distribution(bn);
  std::vector<double> medians;
  for (std::uint64_t m : {1000, 10000, 100000}) {
    std::vector<double> kl;
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto data = forward_sample(bn, m, derive_seed(seed, m + s));
      kl.push_back(kl_divergence(p, joint_distribution(fit_cpts(data, bn.graph(), SmoothingRule{}))));
      ++r.cases;
    }
    medians.push_back(median(kl));
  }
  r.passed = medians[1] < medians[0] && medians[2] < medians[1];
  r.detail = "median KL " + fmt(medians[0]) + ", " + fmt(medians[1]) + ", " + fmt(medians[2]);
  return r;
}

// P1 and P2 from their generative descriptions, in extended precision.
long double mechanism_p1(long double a, int x, int y, int z) {
  const long double pz = z == x ? 0.75L : 0.25L;
  const long double py = y == z ? (1.0L + a) / 2.0L : (1.0L - a) / 2.0L;
  return 0.5L * pz * py;
}

long double mechanism_p2(long double a, int x, int y, int z) {
  return 0.25L * (0.5L * (z == x) + a * (z == y) + (0.5L - a) / 2.0L);
}

double ulps(double got, long double want) {
  const double w = static_cast<double>(want);
  if (got == w) return 0.0;
  return std::abs(static_cast<long double>(got) - want) / static_cast<long double>(std::nextafter(w, 2.0) - w);
}

CheckResult gadget_properties(RngSeed, const PropertySuiteOptions&) {
  CheckResult r;
  double worst_ulps = 0.0;
  std::size_t failed = 0;
  for (double alpha : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const auto g = build_gadget(alpha);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        for (int z = 0; z < 2; ++z) {
          const std::size_t f = static_cast<std::size_t>(x * 4 + z * 2 + y);
          worst_ulps = std::max({worst_ulps, ulps(g.p1[f], mechanism_p1(alpha, x, y, z)),
                                 ulps(g.p2[f], mechanism_p2(alpha, x, y, z))});
        }
      }
    }
    if (!certify_gadget(g).passed()) ++failed;
    ++r.cases;
  }
  r.passed = worst_ulps <= 2.0 && failed == 0;
  r.detail = "max " + fmt(worst_ulps) + " ulps, " + std::to_string(failed) + " certificates failed";
  return r;
}

CheckResult gadget_distinguisher(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  const double alphas[] = {0.1, 0.2, 0.4};
  std::vector<double> n_star, h2;
  for (double alpha : alphas) {
    const auto g = build_gadget(alpha);
    h2.push_back(hellinger_squared(g.p1, g.p2));
    n_star.push_back(static_cast<double>(distinguisher_sample_size(g, 1.0 / 3.0, 500, derive_seed(seed, n_star.size()))));
    ++r.cases;
  }
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i + 1 < n_star.size(); ++i) {
    const double measured = n_star[i] / n_star[i + 1];
    const double predicted = h2[i + 1] / h2[i];
    ok = ok && measured >= predicted / 2.0 && measured <= predicted * 2.0;
    detail << (i ? ", " : "") << "N* ratio " << fmt(measured) << " vs h2 ratio " << fmt(predicted);
  }
  r.passed = ok;
  r.detail = detail.str();
  return r;
}

CheckResult instance_properties(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  std::size_t bad = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto bn = instance(derive_seed(seed, s), 1 + s % 12, 1, std::nullopt);
    if (bn.graph().max_in_degree() > 1 || bn.graph().arc_count() + 1 != bn.vertex_count()) ++bad;
    ++r.cases;
  }
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t d = 1 + s % 4;
    const auto bn = instance(derive_seed(seed, 1000 + s), 2 + s % 9, d, 0.01);
    if (!bn.graph().is_d_polytree(d)) ++bad;
    const auto again = instance(derive_seed(seed, 1000 + s), 2 + s % 9, d, 0.01);
    if (to_json(bn) != to_json(again)) ++bad;
    if (min_edge_mi(bn) < 0.01) ++bad;
    ++r.cases;
  }
  r.passed = bad == 0;
  r.detail = std::to_string(bad) + " violations of bound, determinism or min edge MI";
  return r;
}

CheckResult parent_independence(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto bn = instance(derive_seed(seed, s), 4 + s % 7, 3, std::nullopt);
    const auto p = joint_distribution(bn);
    for (Vertex v = 0; v < bn.vertex_count(); ++v) {
      if (bn.graph().parents(v).size() < 2) continue;
      for (const auto& [a, b] : splits(bn.graph().parents(v))) {
        worst = std::max(worst, mutual_information(p, a, b));
        ++r.cases;
      }
    }
  }
  r.passed = worst <= 1e-10;
  r.detail = "max I(A;B) among co-parents " + fmt(worst);
  return r;
}

CheckResult pipeline_reproducible(RngSeed seed, const PropertySuiteOptions&) {
  CheckResult r;
  auto rows = [](const LearnConfig& cfg) {
    std::string out;
    for (const auto& row : run_learn(cfg)) out += csv_row(row, false) + "\n";
    return out;
  };
  bool ok = true;
  for (TesterMode mode : {TesterMode::oracle, TesterMode::empirical}) {
    LearnConfig cfg;
    cfg.mode = mode;
    cfg.n = 7;
    cfg.trials = 6;
    cfg.seed = seed;
    cfg.sample_sizes = {500, 2000};
    cfg.skeleton = SkeletonSource::chow_liu;
    const auto first = preamble(cfg) + rows(cfg);
    ok = ok && preamble(cfg) + rows(cfg) == first;
    const auto serial = rows(cfg);
    cfg.jobs = 3;
    ok = ok && rows(cfg) == serial;
    r.cases += 2;
  }
  LearnConfig empty;
  empty.trials = 0;
  ok = ok && run_learn(empty).empty();
  r.passed = ok;
  r.detail = ok ? "identical output across reruns and job counts" : "output differs between reruns";
  return r;
}

const std::vector<std::pair<std::string, Check>>& registry() {
  static const std::vector<std::pair<std::string, Check>> checks = {
      {"model.cpt_row_sums", cpt_row_sums},
      {"model.marginal_consistency", marginal_consistency},
      {"model.kl_equals_score_gap", kl_score_identity},
      {"model.chain_rule_identity", chain_rule_identity},
      {"model.parent_identity", parent_identity},
      {"model.nonnegativity", nonnegativity},
      {"model.projection_optimality", projection_optimality},
      {"sampling.plugin_factorization", plugin_factorization},
      {"sampling.seed_determinism", sampling_determinism},
      {"sampling.concentration", sampling_concentration},
      {"tester.verdict_consistency", tester_consistency},
      {"tester.oracle_soundness", tester_oracle_soundness},
      {"tester.calibration", tester_calibration},
      {"orientation.partition_monotone", orientation_partition},
      {"orientation.oracle_soundness_and_bound", orientation_oracle},
      {"skeleton.chow_liu_forest", chow_liu_properties},
      {"skeleton.recovery", skeleton_recovery},
      {"fit.rows_and_plugin", fit_properties},
      {"fit.kl_decreases", fit_kl_decreases},
      {"gadget.atoms_and_certificate", gadget_properties},
      {"gadget.distinguisher_scaling", gadget_distinguisher},
      {"instance.bounds_and_determinism", instance_properties},
      {"instance.parent_independence", parent_independence},
      {"pipeline.reproducible", pipeline_reproducible},
  };
  return checks;
}

}  // namespace

std::vector<std::string> property_check_names() {
  std::vector<std::string> names;
  for (const auto& [name, check] : registry()) names.push_back(name);
  return names;
}

std::vector<CheckResult> run_property_suite(const PropertySuiteOptions& options) {
  std::vector<CheckResult> results;
  std::uint64_t index = 0;
  for (const auto& [name, check] : registry()) {
    const RngSeed seed = derive_seed(options.seed, index++);
    if (options.filter && name.find(*options.filter) == std::string::npos) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = check(seed, options);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
    }
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

std::string to_json(const std::vector<CheckResult>& results) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : results) {
    j.push_back({{"name", r.name}, {"passed", r.passed}, {"cases", r.cases}, {"detail", r.detail},
                 {"seconds", r.seconds}});
  }
  return nlohmann::json{{"checks", j}, {"passed", all_passed(results)}}.dump(2) + "\n";
}

}  // namespace polylearn
