#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "polylearn/bayes_net.hpp"
#include "polylearn/rng.hpp"

namespace polylearn {

struct InstanceSpec {
  std::size_t n = 1;
  std::size_t in_degree_bound = 1;  // d
  std::size_t alphabet_size = 2;
  double concentration = 1.0;  // Dirichlet parameter for every CPT row
  std::optional<double> min_edge_mi;
  double edge_drop_probability = 0.0;  // > 0 turns the spanning tree into a forest
  RngSeed seed;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Raised when CPT resampling cannot reach `min_edge_mi`.
class ResamplingExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxCptResamples = 1000;
inline constexpr std::size_t kVertexRedraws = 100;

/// Uniform random spanning tree (Pruefer code), optional edge deletion, random
/// root with arcs pointing away, then random flips towards already-entered
/// vertices while the in-degree bound allows. CPT rows ~ Dirichlet.
DiscreteBayesNet random_polytree(const InstanceSpec& spec);

/// Smallest I(u;v) over the arcs u -> v of `bn` under its exact joint.
double min_edge_mi(const DiscreteBayesNet& bn);

/// Dirichlet CPTs on a fixed graph. With `min_mi`, CPTs are drawn in
/// topological order and each vertex is redrawn (up to kVertexRedraws times)
/// until every arc into it has exact I(u;v) >= min_mi; a vertex that cannot
/// get there restarts the sweep, at most kMaxCptResamples sweeps in all.
/// Throws ResamplingExhausted, immediately if min_mi exceeds log2 of an arc's
/// smaller alphabet.
DiscreteBayesNet random_cpts(const PolytreeGraph& graph, const Alphabet& alphabet,
                             double concentration, std::optional<double> min_mi, Rng& rng);

/// Vertex names of the ten-node example network, indexed by vertex.
inline constexpr const char* kFigure1Names[] = {"a", "b", "c", "d", "e",
                                                "f", "g", "h", "i", "j"};

/// a->d, b->d, c->d, d->f, e->f, f->g, e->h, g->i, j->g, binary, seeded
/// Dirichlet(1) CPTs, optionally resampled to a minimum edge MI.
DiscreteBayesNet figure1_fixture(RngSeed seed, std::optional<double> min_edge_mi = std::nullopt);

PolytreeGraph figure1_graph();

}  // namespace polylearn
