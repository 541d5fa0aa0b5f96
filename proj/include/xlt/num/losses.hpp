// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "xlt/num/graph.hpp"

namespace xlt::num {

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before the log.
inline constexpr double kProbClamp = 1e-7;

/// d(a, b) = 1 - a.b / (|a||b|), in [0, 2]. Throws DomainError on a zero-norm input.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Mean binary cross-entropy, -(1/N) sum[y log p + (1-y) log(1-p)].
double bce_loss(std::span<const double> p, std::span<const double> y);

/// Differentiable cosine distance between two vectors; returns a scalar.
Var cosine_distance(Var a, Var b);
/// Row-wise cosine distances between two [N, d] matrices; returns [N].
Var cosine_distance_rows(Var a, Var b);
/// Differentiable BCE of probabilities `p` (rank 1) against constant labels.
/// The clamp passes zero gradient outside the admissible interval.
Var bce_loss(Var p, std::span<const double> y);

}  // namespace xlt::num
