#pragma once

#include "polylearn/bayes_net.hpp"
#include "polylearn/sampling.hpp"

namespace polylearn {

/// Add-kappa pseudo-counts per CPT cell. kappa = 1 is Laplace smoothing.
struct SmoothingRule {
  double kappa = 1.0;
};

/// cpt_v(x|a) = (count(v=x, pa=a) + kappa) / (count(pa=a) + kappa |S_v|);
/// parent configurations never observed (with kappa = 0) get uniform rows.
DiscreteBayesNet fit_cpts(const Dataset& data, const PolytreeGraph& graph,
                          SmoothingRule rule = {});

}  // namespace polylearn
