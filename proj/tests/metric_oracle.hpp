// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace oracle {

// Brute force over every class present, F1 as 2tp / (2tp + fp + fn).
inline double weighted_f1(const std::vector<int>& preds, const std::vector<int>& labels) {
  double total = 0.0;
  for (int c = 0; c <= 1; ++c) {
    long tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool p = preds[i] == c, t = labels[i] == c;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
      support += t;
    }
    const long den = 2 * tp + fp + fn;
    const double f1 = den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
    total += static_cast<double>(support) * f1;
  }
  return total / static_cast<double>(preds.size());
}

}  // namespace oracle
