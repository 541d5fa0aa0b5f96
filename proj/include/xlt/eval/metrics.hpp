// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace xlt::eval {

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

/// Binary classification report; classes are 0 and 1.
struct MetricsReport {
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  std::array<ClassStats, 2> per_class{};
  std::size_t n = 0;
};

/// Throws ShapeError on length mismatch or empty input, DomainError on a
/// label outside {0, 1}.
double accuracy(std::span<const int> preds, std::span<const int> labels);
/// Support-weighted mean of per-class F1; an empty precision or recall
/// denominator counts as 0.
double weighted_f1(std::span<const int> preds, std::span<const int> labels);
MetricsReport evaluate(std::span<const int> preds, std::span<const int> labels);

}  // namespace xlt::eval
