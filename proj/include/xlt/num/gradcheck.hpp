// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "xlt/num/graph.hpp"

namespace xlt::num {

/// A scalar function of several tensors with a claimed analytic gradient.
struct DifferentiableFn {
  std::function<double(std::span<const Tensor>)> value;
  std::function<std::vector<Tensor>(std::span<const Tensor>)> gradient;
};

/// Builds the scalar output of a computation from leaf variables.
using GraphFn = std::function<Var(Graph&, std::span<const Var>)>;

/// Adapts a graph-building function: value from a forward pass, gradient from backward.
DifferentiableFn from_graph(GraphFn fn);

struct GradCheckReport {
  bool passed = true;
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  std::size_t failures = 0;
  /// Location of the worst coordinate, "input i[j]".
  std::string worst;

  std::string summary() const;
};

/// Compares the analytic gradient with central differences
/// (f(x+eps) - f(x-eps)) / (2 eps) on every coordinate. The relative error
/// uses max(|analytic|, |numeric|, 1e-12) as denominator.
/// eps must lie in [1e-7, 1e-3].
GradCheckReport finite_diff_check(const DifferentiableFn& fn, std::vector<Tensor> inputs, double eps,
                                  double tol);

/// Merges reports (e.g. over random instances) into one.
GradCheckReport merge(std::span<const GradCheckReport> reports);

}  // namespace xlt::num
