// SPDX-License-Identifier: Apache-2.0
#include "xlt/eval/metrics.hpp"

#include <string>

#include "xlt/error.hpp"

namespace xlt::eval {

namespace {

void check(std::span<const int> preds, std::span<const int> labels) {
  if (preds.size() != labels.size()) {
    throw ShapeError("metrics: " + std::to_string(preds.size()) + " predictions for " +
                     std::to_string(labels.size()) + " labels");
  }
  if (preds.empty()) throw ShapeError("metrics: empty input");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if ((preds[i] != 0 && preds[i] != 1) || (labels[i] != 0 && labels[i] != 1)) {
      throw DomainError("metrics: label outside {0, 1} at index " + std::to_string(i));
    }
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport evaluate(std::span<const int> preds, std::span<const int> labels) {
  check(preds, labels);
  // confusion[true][pred]
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < preds.size(); ++i) ++confusion[labels[i]][preds[i]];

  MetricsReport r;
  r.n = preds.size();
  r.accuracy = ratio(confusion[0][0] + confusion[1][1], r.n);
  for (int c = 0; c < 2; ++c) {
    const std::size_t tp = confusion[c][c];
    const std::size_t predicted = confusion[0][c] + confusion[1][c];
    const std::size_t actual = confusion[c][0] + confusion[c][1];
    ClassStats& s = r.per_class[static_cast<std::size_t>(c)];
    s.support = actual;
    s.precision = ratio(tp, predicted);
    s.recall = ratio(tp, actual);
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    r.weighted_f1 += ratio(actual, r.n) * s.f1;
  }
  return r;
}

double accuracy(std::span<const int> preds, std::span<const int> labels) {
  return evaluate(preds, labels).accuracy;
}

double weighted_f1(std::span<const int> preds, std::span<const int> labels) {
  return evaluate(preds, labels).weighted_f1;
}

}  // namespace xlt::eval
