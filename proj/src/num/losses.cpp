// SPDX-License-Identifier: Apache-2.0
#include "xlt/num/losses.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "xlt/error.hpp"
#include "xlt/num/ops.hpp"

namespace xlt::num {
namespace {

void check_labels(std::span<const double> p, std::span<const double> y) {
  if (p.size() != y.size()) {
    throw ShapeError("bce: " + std::to_string(p.size()) + " probabilities vs " + std::to_string(y.size()) +
                     " labels");
  }
  if (p.empty()) throw ShapeError("bce: empty batch");
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("cosine_distance: vector lengths differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("cosine_distance: zero-norm vector");
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

double bce_loss(std::span<const double> p, std::span<const double> y) {
  check_labels(p, y);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pc = clamp_prob(p[i]);
    total += y[i] * std::log(pc) + (1.0 - y[i]) * std::log(1.0 - pc);
  }
  return -total / static_cast<double>(p.size());
}

Var cosine_distance_rows(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) {
    throw ShapeError("cosine_distance_rows: shape mismatch " + shape_str(av.shape()) + " vs " +
                     shape_str(bv.shape()));
  }
  const std::size_t n = av.rows(), d = av.cols();
  // Per row: dot, |a|, |b|.
  auto stats = std::make_shared<std::vector<double>>(3 * n);
  Tensor y(Shape{n});
  for (std::size_t r = 0; r < n; ++r) {
    const double* ar = av.ptr() + r * d;
    const double* br = bv.ptr() + r * d;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      dot += ar[c] * br[c];
      na += ar[c] * ar[c];
      nb += br[c] * br[c];
    }
    if (!(na > 0.0) || !(nb > 0.0)) {
      throw DomainError("cosine_distance: zero-norm vector in row " + std::to_string(r));
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    (*stats)[3 * r] = dot;
    (*stats)[3 * r + 1] = na;
    (*stats)[3 * r + 2] = nb;
    y[r] = 1.0 - dot / (na * nb);
  }
  return a.graph().record(std::move(y), {a, b}, [a, b, stats](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    const Tensor& av = g.value(a.id());
    const Tensor& bv = g.value(b.id());
    const std::size_t n = av.rows(), d = av.cols();
    const bool want_a = g.requires_grad(a.id()), want_b = g.requires_grad(b.id());
    Tensor* ga = want_a ? &g.grad_buffer(a.id()) : nullptr;
    Tensor* gb = want_b ? &g.grad_buffer(b.id()) : nullptr;
    for (std::size_t r = 0; r < n; ++r) {
      const double dot = (*stats)[3 * r], na = (*stats)[3 * r + 1], nb = (*stats)[3 * r + 2];
      const double cos = dot / (na * nb);
      const double* ar = av.ptr() + r * d;
      const double* br = bv.ptr() + r * d;
      // d(1 - cos)/da = -(b / (|a||b|) - cos * a / |a|^2)
      for (std::size_t c = 0; c < d; ++c) {
        if (ga) (*ga)[r * d + c] -= gy[r] * (br[c] / (na * nb) - cos * ar[c] / (na * na));
        if (gb) (*gb)[r * d + c] -= gy[r] * (ar[c] / (na * nb) - cos * br[c] / (nb * nb));
      }
    }
  });
}

Var cosine_distance(Var a, Var b) {
  if (a.value().numel() != b.value().numel()) throw ShapeError("cosine_distance: vector lengths differ");
  if (a.value().rows() != 1 || b.value().rows() != 1) throw ShapeError("cosine_distance: expected vectors");
  return sum(cosine_distance_rows(a, b));
}

Var bce_loss(Var p, std::span<const double> y) {
  const Tensor& pv = p.value();
  check_labels(pv.data(), y);
  const double loss = bce_loss(pv.data(), y);
  auto labels = std::make_shared<std::vector<double>>(y.begin(), y.end());
  return p.graph().record(Tensor::scalar(loss), {p}, [p, labels](Graph& g, std::size_t self) {
    if (!g.requires_grad(p.id())) return;
    const double gy = g.grad_buffer(self)[0];
    const Tensor& pv = g.value(p.id());
    Tensor& gp = g.grad_buffer(p.id());
    const double inv_n = 1.0 / static_cast<double>(pv.numel());
    for (std::size_t i = 0; i < pv.numel(); ++i) {
      const double pi = pv[i];
      if (pi < kProbClamp || pi > 1.0 - kProbClamp) continue;
      const double yi = (*labels)[i];
      gp[i] += -gy * inv_n * (yi / pi - (1.0 - yi) / (1.0 - pi));
    }
  });
}

}  // namespace xlt::num
