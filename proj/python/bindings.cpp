#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "polylearn/ci_tester.hpp"
#include "polylearn/gadgets.hpp"
#include "polylearn/information.hpp"
#include "polylearn/instance_gen.hpp"
#include "polylearn/model_io.hpp"
#include "polylearn/orientation.hpp"
#include "polylearn/param_fit.hpp"
#include "polylearn/pipeline.hpp"
#include "polylearn/property_suite.hpp"
#include "polylearn/skeleton_recovery.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace polylearn;

namespace {

using Arcs = std::vector<std::pair<Vertex, Vertex>>;

PolytreeGraph to_graph(std::size_t n, const Arcs& arcs) {
  std::vector<Arc> out;
  for (auto [u, v] : arcs) out.push_back({u, v});
  return PolytreeGraph(n, std::move(out));
}

Arcs from_graph(const PolytreeGraph& g) {
  Arcs out;
  for (const Arc& a : g.arcs()) out.emplace_back(a.parent, a.child);
  return out;
}

Skeleton to_skeleton(std::size_t n, const Arcs& edges) {
  std::vector<UndirectedEdge> out;
  for (auto [u, v] : edges) out.push_back(make_edge(u, v));
  return Skeleton(n, std::move(out));
}

Dataset to_dataset(py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> rows,
                   const std::vector<std::size_t>& sizes) {
  if (rows.ndim() != 2) throw std::invalid_argument("samples must be a 2-d array");
  if (static_cast<std::size_t>(rows.shape(1)) != sizes.size()) {
    throw std::invalid_argument("sample width does not match the alphabet");
  }
  std::vector<Symbol> flat(static_cast<std::size_t>(rows.size()));
  const auto* p = rows.data();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (p[i] < 0 || p[i] > 65535) throw std::invalid_argument("symbol out of range");
    flat[i] = static_cast<Symbol>(p[i]);
  }
  return Dataset(Alphabet(sizes), std::move(flat));
}

py::array_t<std::int64_t> to_array(const Dataset& d) {
  py::array_t<std::int64_t> out({d.row_count(), d.variable_count()});
  auto* p = out.mutable_data();
  for (std::size_t i = 0; i < d.raw().size(); ++i) p[i] = d.raw()[i];
  return out;
}

py::object parse_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

LearnConfig learn_config(const py::dict& kw) {
  LearnConfig c;
  for (auto [key, value] : kw) {
    const auto k = key.cast<std::string>();
    if (k == "instance") {
      const auto s = value.cast<std::string>();
      if (s != "random" && s != "figure1") throw std::invalid_argument("instance must be random or figure1");
      c.instance = s == "figure1" ? InstanceSource::figure1 : InstanceSource::random;
    } else if (k == "n") c.n = value.cast<std::size_t>();
    else if (k == "in_degree_bound") c.in_degree_bound = value.cast<std::size_t>();
    else if (k == "alphabet_size") c.alphabet_size = value.cast<std::size_t>();
    else if (k == "concentration") c.concentration = value.cast<double>();
    else if (k == "min_edge_mi") c.min_edge_mi = value.cast<std::optional<double>>();
    else if (k == "edge_drop_probability") c.edge_drop_probability = value.cast<double>();
    else if (k == "epsilon") c.epsilon = value.cast<double>();
    else if (k == "delta") c.delta = value.cast<double>();
    else if (k == "tester_constant") c.tester_constant = value.cast<double>();
    else if (k == "test_epsilon") c.test_epsilon = value.cast<std::optional<double>>();
    else if (k == "mode") {
      const auto s = value.cast<std::string>();
      if (s != "oracle" && s != "empirical") throw std::invalid_argument("mode must be oracle or empirical");
      c.mode = s == "oracle" ? TesterMode::oracle : TesterMode::empirical;
    } else if (k == "skeleton") {
      const auto s = value.cast<std::string>();
      if (s != "given" && s != "chow_liu" && s != "chow-liu") throw std::invalid_argument("skeleton must be given or chow-liu");
      c.skeleton = s != "given" ? SkeletonSource::chow_liu : SkeletonSource::given;
    } else if (k == "sample_sizes") c.sample_sizes = value.cast<std::vector<std::uint64_t>>();
    else if (k == "kappa") c.kappa = value.cast<double>();
    else if (k == "trials") c.trials = value.cast<std::size_t>();
    else if (k == "seed") c.seed = RngSeed{value.cast<std::uint64_t>()};
    else if (k == "jobs") c.jobs = value.cast<std::size_t>();
    else throw std::invalid_argument("unknown learn option: " + k);
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(polylearn, m) {
  m.doc() = "Polytree learning: exact information quantities, orientation, and experiments.";
  m.attr("__version__") = kLibraryVersion;

  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_MemoryError);
  py::register_exception<ResamplingExhausted>(m, "ResamplingExhausted", PyExc_RuntimeError);
  py::register_exception<OrientationError>(m, "OrientationError", PyExc_ValueError);

  py::class_<JointTable>(m, "JointTable")
      .def(py::init([](std::vector<std::size_t> sizes, std::vector<double> pmf) {
             return JointTable(Alphabet(std::move(sizes)), std::move(pmf));
           }),
           "sizes"_a, "pmf"_a)
      .def_property_readonly("sizes", [](const JointTable& t) { return t.alphabet().sizes(); })
      .def_property_readonly("pmf", [](const JointTable& t) {
        return std::vector<double>(t.pmf().begin(), t.pmf().end());
      })
      .def("marginal", [](const JointTable& t, const VarList& vars) { return marginal(t, vars); })
      .def("__len__", &JointTable::size);

  py::class_<DiscreteBayesNet>(m, "BayesNet")
      .def_static("from_json", &bayes_net_from_json)
      .def("to_json", [](const DiscreteBayesNet& bn) { return to_json(bn); })
      .def_property_readonly("n", &DiscreteBayesNet::vertex_count)
      .def_property_readonly("arcs", [](const DiscreteBayesNet& bn) { return from_graph(bn.graph()); })
      .def_property_readonly("sizes", [](const DiscreteBayesNet& bn) { return bn.alphabet().sizes(); })
      .def("joint", &joint_distribution)
      .def("sample", [](const DiscreteBayesNet& bn, std::size_t m, std::uint64_t seed) {
             return to_array(forward_sample(bn, m, RngSeed{seed}));
           },
           "m"_a, "seed"_a);

  m.def("random_polytree",
        [](std::size_t n, std::size_t d, std::size_t alphabet_size, double concentration,
           std::optional<double> min_edge_mi, double edge_drop_probability, std::uint64_t seed) {
          InstanceSpec s;
          s.n = n;
          s.in_degree_bound = d;
          s.alphabet_size = alphabet_size;
          s.concentration = concentration;
          s.min_edge_mi = min_edge_mi;
          s.edge_drop_probability = edge_drop_probability;
          s.seed = RngSeed{seed};
          return random_polytree(s);
        },
        "n"_a, "in_degree_bound"_a = 1, "alphabet_size"_a = 2, "concentration"_a = 1.0,
        "min_edge_mi"_a = py::none(), "edge_drop_probability"_a = 0.0, "seed"_a = 0);
  m.def("figure1_fixture", [](std::uint64_t seed, std::optional<double> min_mi) {
    return figure1_fixture(RngSeed{seed}, min_mi);
  }, "seed"_a = 0, "min_edge_mi"_a = py::none());
  m.def("project_onto", [](const JointTable& p, std::size_t n, const Arcs& arcs) {
    return project_onto(p, to_graph(n, arcs));
  }, "p"_a, "n"_a, "arcs"_a);

  m.def("entropy", &entropy);
  m.def("mutual_information", [](const JointTable& p, const VarList& a, const VarList& b) {
    return mutual_information(p, a, b);
  });
  m.def("conditional_mutual_information",
        [](const JointTable& p, const VarList& a, const VarList& b, const VarList& z) {
          return conditional_mutual_information(p, a, b, z);
        },
        "p"_a, "a"_a, "b"_a, "z"_a = VarList{});
  m.def("kl_divergence", &kl_divergence);
  m.def("hellinger_squared", &hellinger_squared);
  m.def("mi_score", [](const JointTable& p, const Arcs& arcs) {
    return mi_score(p, to_graph(p.variable_count(), arcs));
  });
  m.def("required_sample_size", &required_sample_size, "sigma_x"_a, "sigma_y"_a, "sigma_z"_a, "epsilon"_a,
        "delta"_a);

  m.def("chow_liu",
        [](py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> samples,
           std::vector<std::size_t> sizes, std::optional<double> prune_below) {
          const auto sk = chow_liu_skeleton(pairwise_mi(to_dataset(samples, sizes)), prune_below);
          Arcs out;
          for (const auto& e : sk.edges()) out.emplace_back(e.u, e.v);
          return out;
        },
        "samples"_a, "sizes"_a, "prune_below"_a = py::none());
  m.def("check_assumption", [](const DiscreteBayesNet& bn) {
    return parse_json(to_json(check_assumption(joint_distribution(bn), bn.graph())));
  });

  m.def("learn_orientation",
        [](const JointTable& p, const Arcs& skeleton, std::size_t d, double epsilon, double constant) {
          OrientationConfig cfg;
          cfg.in_degree_bound = d;
          cfg.tester = oracle_tester(p, epsilon, constant);
          const auto res = learn_orientation(to_skeleton(p.variable_count(), skeleton), cfg);
          return py::dict("arcs"_a = from_graph(res.graph), "trace"_a = res.trace.to_jsonl(),
                          "phase2_passes"_a = res.phase2_passes);
        },
        "p"_a, "skeleton"_a, "in_degree_bound"_a, "epsilon"_a, "constant"_a = kDefaultTesterConstant,
        "Orientation with exact CMI values from the joint.");
  m.def("learn_orientation_from_samples",
        [](py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> samples,
           std::vector<std::size_t> sizes, const Arcs& skeleton, std::size_t d, double epsilon, double delta,
           double constant) {
          OrientationConfig cfg;
          cfg.in_degree_bound = d;
          cfg.tester = empirical_tester(to_dataset(samples, sizes), epsilon, delta, constant);
          const auto res = learn_orientation(to_skeleton(sizes.size(), skeleton), cfg);
          return py::dict("arcs"_a = from_graph(res.graph), "trace"_a = res.trace.to_jsonl(),
                          "phase2_passes"_a = res.phase2_passes);
        },
        "samples"_a, "sizes"_a, "skeleton"_a, "in_degree_bound"_a, "epsilon"_a, "delta"_a = 0.1,
        "constant"_a = kDefaultTesterConstant);
  m.def("fit_cpts",
        [](py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> samples,
           std::vector<std::size_t> sizes, const Arcs& arcs, double kappa) {
          return fit_cpts(to_dataset(samples, sizes), to_graph(sizes.size(), arcs), {kappa});
        },
        "samples"_a, "sizes"_a, "arcs"_a, "kappa"_a = 1.0);

  m.def("certify_gadget", [](double alpha) { return parse_json(to_json(certify_gadget(build_gadget(alpha)))); });
  m.def("gadget_tables", [](double alpha) {
    const auto g = build_gadget(alpha);
    return py::make_tuple(g.p1, g.p2);
  });

  m.def("learn", [](py::kwargs kw) {
    const auto cfg = learn_config(kw);
    std::vector<TrialResult> rows;
    {
      py::gil_scoped_release release;
      rows = run_learn(cfg);
    }
    py::list out;
    for (const auto& r : rows) {
      out.append(py::dict("trial"_a = r.trial, "seed"_a = r.seed, "n"_a = r.n, "d"_a = r.d, "d_star"_a = r.d_star,
                          "m"_a = r.m, "mode"_a = to_string(r.mode), "skeleton_ok"_a = r.skeleton_ok,
                          "graph_gap_bits"_a = r.graph_gap_bits, "kl_total_bits"_a = r.kl_total_bits,
                          "kl_param_gap_bits"_a = r.kl_param_gap_bits, "runtime_ms"_a = r.runtime_ms));
    }
    return out;
  }, "Runs the learn experiment; keyword names match the CLI flags with underscores.");

  m.def("property_suite", [](std::uint64_t seed, std::optional<std::string> filter) {
    PropertySuiteOptions o;
    o.seed = RngSeed{seed};
    o.filter = std::move(filter);
    std::vector<CheckResult> res;
    {
      py::gil_scoped_release release;
      res = run_property_suite(o);
    }
    return parse_json(to_json(res));
  }, "seed"_a = 20260101, "filter"_a = py::none());
}
