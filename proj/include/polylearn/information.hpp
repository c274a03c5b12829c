#pragma once

#include <limits>
#include <span>

#include "polylearn/core.hpp"
#include "polylearn/joint_table.hpp"

namespace polylearn {

/// Returned by kl_divergence when P puts mass where Q has none.
inline constexpr double kInfiniteDivergence = std::numeric_limits<double>::infinity();

/// Shannon entropy in bits, 0 log 0 = 0.
double entropy(const JointTable& table);

/// I(A;B) in bits. A and B must be nonempty and disjoint.
double mutual_information(const JointTable& joint, std::span<const Vertex> a,
                          std::span<const Vertex> b);

/// I(A;B|Z) in bits. Z may be empty, in which case this is I(A;B).
///
/// Variable sets are canonicalized (sorted) before marginalizing. The result
/// is clamped at zero from below; exact-arithmetic values are nonnegative and
/// the negative residue is floating-point noise.
double conditional_mutual_information(const JointTable& joint, std::span<const Vertex> a,
                                      std::span<const Vertex> b, std::span<const Vertex> z);

/// KL(P||Q) in bits, or kInfiniteDivergence when supp(P) is not within supp(Q).
double kl_divergence(const JointTable& p, const JointTable& q);

/// 1 - sum sqrt(P(x) Q(x)), clamped to [0, 1].
double hellinger_squared(const JointTable& p, const JointTable& q);

}  // namespace polylearn
