// SPDX-License-Identifier: Apache-2.0
#include "xlt/num/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "xlt/error.hpp"

namespace xlt::num {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

CMapMat as_mat(const Tensor& t) { return CMapMat(t.ptr(), t.rows(), t.cols()); }
MapMat as_mat(Tensor& t) { return MapMat(t.ptr(), t.rows(), t.cols()); }

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
}

void require_rank2(const char* op, const Tensor& a) {
  if (a.rank() != 2) throw ShapeError(std::string(op) + ": expected a matrix, got " + shape_str(a.shape()));
}

void accumulate(Graph& g, Var v, const Tensor& delta) {
  if (!g.requires_grad(v.id())) return;
  Tensor& buf = g.grad_buffer(v.id());
  for (std::size_t i = 0; i < delta.numel(); ++i) buf[i] += delta[i];
}

// Elementwise unary op with derivative computed from (input, output).
template <typename F, typename D>
Var unary(Var a, F f, D df) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) y[i] = f(x[i]);
  return a.graph().record(std::move(y), {a}, [a, df](Graph& g, std::size_t self) {
    if (!g.requires_grad(a.id())) return;
    const Tensor& x = g.value(a.id());
    const Tensor& y = g.value(self);
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(a.id());
    for (std::size_t i = 0; i < x.numel(); ++i) gx[i] += gy[i] * df(x[i], y[i]);
  });
}

}  // namespace

Var add(Var a, Var b) {
  require_same_shape("add", a.value(), b.value());
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] += bv[i];
  return a.graph().record(std::move(y), {a, b}, [a, b](Graph& g, std::size_t self) {
    const Tensor gy = g.grad_buffer(self);
    accumulate(g, a, gy);
    accumulate(g, b, gy);
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a.value(), b.value());
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] -= bv[i];
  return a.graph().record(std::move(y), {a, b}, [a, b](Graph& g, std::size_t self) {
    Tensor gy = g.grad_buffer(self);
    accumulate(g, a, gy);
    for (std::size_t i = 0; i < gy.numel(); ++i) gy[i] = -gy[i];
    accumulate(g, b, gy);
  });
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a.value(), b.value());
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] *= bv[i];
  return a.graph().record(std::move(y), {a, b}, [a, b](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    const Tensor& av = g.value(a.id());
    const Tensor& bv = g.value(b.id());
    if (g.requires_grad(a.id())) {
      Tensor& ga = g.grad_buffer(a.id());
      for (std::size_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i] * bv[i];
    }
    if (g.requires_grad(b.id())) {
      Tensor& gb = g.grad_buffer(b.id());
      for (std::size_t i = 0; i < gy.numel(); ++i) gb[i] += gy[i] * av[i];
    }
  });
}

Var scale(Var a, double s) {
  Tensor y = a.value();
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] *= s;
  return a.graph().record(std::move(y), {a}, [a, s](Graph& g, std::size_t self) {
    if (!g.requires_grad(a.id())) return;
    const Tensor& gy = g.grad_buffer(self);
    Tensor& ga = g.grad_buffer(a.id());
    for (std::size_t i = 0; i < gy.numel(); ++i) ga[i] += s * gy[i];
  });
}

Var add_row(Var a, Var row) {
  const Tensor& av = a.value();
  const Tensor& rv = row.value();
  if (rv.numel() != av.cols()) {
    throw ShapeError("add_row: row of " + std::to_string(rv.numel()) + " values for " +
                     std::to_string(av.cols()) + " columns");
  }
  Tensor y = av;
  const std::size_t m = y.rows(), n = y.cols();
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) y[r * n + c] += rv[c];
  return a.graph().record(std::move(y), {a, row}, [a, row](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    accumulate(g, a, gy);
    if (g.requires_grad(row.id())) {
      Tensor& gr = g.grad_buffer(row.id());
      const std::size_t n = gr.numel(), m = gy.numel() / n;
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) gr[c] += gy[r * n + c];
    }
  });
}

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2("matmul", av);
  require_rank2("matmul", bv);
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: inner dimensions differ, " + shape_str(av.shape()) + " x " +
                     shape_str(bv.shape()));
  }
  Tensor y(Shape{av.rows(), bv.cols()});
  as_mat(y).noalias() = as_mat(av) * as_mat(bv);
  return a.graph().record(std::move(y), {a, b}, [a, b](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    if (g.requires_grad(a.id())) {
      as_mat(g.grad_buffer(a.id())).noalias() += as_mat(gy) * as_mat(g.value(b.id())).transpose();
    }
    if (g.requires_grad(b.id())) {
      as_mat(g.grad_buffer(b.id())).noalias() += as_mat(g.value(a.id())).transpose() * as_mat(gy);
    }
  });
}

Var linear(Var x, Var w, Var b) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  require_rank2("linear", xv);
  require_rank2("linear", wv);
  if (xv.cols() != wv.rows() || bv.numel() != wv.cols()) {
    throw ShapeError("linear: incompatible shapes " + shape_str(xv.shape()) + " x " + shape_str(wv.shape()) +
                     " + " + shape_str(bv.shape()));
  }
  Tensor y(Shape{xv.rows(), wv.cols()});
  auto ym = as_mat(y);
  ym.noalias() = as_mat(xv) * as_mat(wv);
  ym.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bv.ptr(), bv.numel());
  return x.graph().record(std::move(y), {x, w, b}, [x, w, b](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    if (g.requires_grad(x.id())) {
      as_mat(g.grad_buffer(x.id())).noalias() += as_mat(gy) * as_mat(g.value(w.id())).transpose();
    }
    if (g.requires_grad(w.id())) {
      as_mat(g.grad_buffer(w.id())).noalias() += as_mat(g.value(x.id())).transpose() * as_mat(gy);
    }
    if (g.requires_grad(b.id())) {
      Tensor& gb = g.grad_buffer(b.id());
      Eigen::Map<Eigen::RowVectorXd>(gb.ptr(), gb.numel()) += as_mat(gy).colwise().sum();
    }
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return a.graph().record(Tensor::scalar(s), {a}, [a](Graph& g, std::size_t self) {
    if (!g.requires_grad(a.id())) return;
    const double gy = g.grad_buffer(self)[0];
    Tensor& ga = g.grad_buffer(a.id());
    for (std::size_t i = 0; i < ga.numel(); ++i) ga[i] += gy;
  });
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().numel())); }

Var relu(Var a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var gelu(Var a) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const Tensor& x = a.value();
  Tensor y(x.shape());
  // d/dx x*Phi(x) = Phi(x) + x*phi(x); kept from the forward pass.
  auto slope = std::make_shared<std::vector<double>>(x.numel());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double cdf = 0.5 * (1.0 + std::erf(x[i] * inv_sqrt2));
    y[i] = x[i] * cdf;
    (*slope)[i] = cdf + x[i] * inv_sqrt_2pi * std::exp(-0.5 * x[i] * x[i]);
  }
  return a.graph().record(std::move(y), {a}, [a, slope](Graph& g, std::size_t self) {
    if (!g.requires_grad(a.id())) return;
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(a.id());
    for (std::size_t i = 0; i < gx.numel(); ++i) gx[i] += gy[i] * (*slope)[i];
  });
}

Var tanh(Var a) {
  return unary(
      a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var exp(Var a) {
  return unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a) {
  for (double v : a.value().data()) {
    if (!(v > 0.0)) throw DomainError("log of non-positive value");
  }
  return unary(
      a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var softmax_rows(Var a) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  const std::size_t m = x.rows(), n = x.cols();
  for (std::size_t r = 0; r < m; ++r) {
    const double* xr = x.ptr() + r * n;
    double* yr = y.ptr() + r * n;
    double mx = xr[0];
    for (std::size_t c = 1; c < n; ++c) mx = std::max(mx, xr[c]);
    double z = 0.0;
    for (std::size_t c = 0; c < n; ++c) z += (yr[c] = std::exp(xr[c] - mx));
    for (std::size_t c = 0; c < n; ++c) yr[c] /= z;
  }
  return a.graph().record(std::move(y), {a}, [a](Graph& g, std::size_t self) {
    if (!g.requires_grad(a.id())) return;
    const Tensor& y = g.value(self);
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(a.id());
    const std::size_t n = y.cols(), m = y.rows();
    for (std::size_t r = 0; r < m; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < n; ++c) dot += gy[r * n + c] * y[r * n + c];
      for (std::size_t c = 0; c < n; ++c) gx[r * n + c] += y[r * n + c] * (gy[r * n + c] - dot);
    }
  });
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  const Tensor& xv = x.value();
  const std::size_t m = xv.rows(), n = xv.cols();
  if (gamma.value().numel() != n || beta.value().numel() != n) {
    throw ShapeError("layer_norm: gain/bias must have " + std::to_string(n) + " values");
  }
  const Tensor& gv = gamma.value();
  const Tensor& bv = beta.value();
  Tensor y(xv.shape());
  auto xhat = std::make_shared<std::vector<double>>(xv.numel());
  auto inv_std = std::make_shared<std::vector<double>>(m);
  for (std::size_t r = 0; r < m; ++r) {
    const double* xr = xv.ptr() + r * n;
    double mu = 0.0;
    for (std::size_t c = 0; c < n; ++c) mu += xr[c];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t c = 0; c < n; ++c) var += (xr[c] - mu) * (xr[c] - mu);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = inv;
    for (std::size_t c = 0; c < n; ++c) {
      const double h = (xr[c] - mu) * inv;
      (*xhat)[r * n + c] = h;
      y[r * n + c] = h * gv[c] + bv[c];
    }
  }
  return x.graph().record(std::move(y), {x, gamma, beta},
                          [x, gamma, beta, xhat, inv_std](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    const Tensor& gv = g.value(gamma.id());
    const std::size_t n = gv.numel(), m = gy.numel() / n;
    if (g.requires_grad(gamma.id()) || g.requires_grad(beta.id())) {
      const bool want_g = g.requires_grad(gamma.id()), want_b = g.requires_grad(beta.id());
      Tensor* gg = want_g ? &g.grad_buffer(gamma.id()) : nullptr;
      Tensor* gb = want_b ? &g.grad_buffer(beta.id()) : nullptr;
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          if (gg) (*gg)[c] += gy[r * n + c] * (*xhat)[r * n + c];
          if (gb) (*gb)[c] += gy[r * n + c];
        }
      }
    }
    if (!g.requires_grad(x.id())) return;
    Tensor& gx = g.grad_buffer(x.id());
    std::vector<double> dh(n);
    for (std::size_t r = 0; r < m; ++r) {
      double mean_dh = 0.0, mean_dh_h = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        dh[c] = gy[r * n + c] * gv[c];
        mean_dh += dh[c];
        mean_dh_h += dh[c] * (*xhat)[r * n + c];
      }
      mean_dh /= static_cast<double>(n);
      mean_dh_h /= static_cast<double>(n);
      const double inv = (*inv_std)[r];
      for (std::size_t c = 0; c < n; ++c) {
        gx[r * n + c] += inv * (dh[c] - mean_dh - (*xhat)[r * n + c] * mean_dh_h);
      }
    }
  });
}

Var embedding(Var table, std::span<const std::int32_t> ids) {
  const Tensor& tv = table.value();
  require_rank2("embedding", tv);
  const std::size_t vocab = tv.rows(), d = tv.cols();
  if (ids.empty()) throw ShapeError("embedding: empty id list");
  Tensor y(Shape{ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      throw ShapeError("embedding: id " + std::to_string(ids[i]) + " outside table of " +
                       std::to_string(vocab) + " rows");
    }
    std::copy_n(tv.ptr() + static_cast<std::size_t>(ids[i]) * d, d, y.ptr() + i * d);
  }
  auto saved = std::make_shared<std::vector<std::int32_t>>(ids.begin(), ids.end());
  return table.graph().record(std::move(y), {table}, [table, saved](Graph& g, std::size_t self) {
    if (!g.requires_grad(table.id())) return;
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gt = g.grad_buffer(table.id());
    const std::size_t d = gt.cols();
    for (std::size_t i = 0; i < saved->size(); ++i) {
      double* dst = gt.ptr() + static_cast<std::size_t>((*saved)[i]) * d;
      for (std::size_t c = 0; c < d; ++c) dst[c] += gy[i * d + c];
    }
  });
}

Var gather_rows(Var x, std::span<const std::size_t> rows) {
  const Tensor& xv = x.value();
  const std::size_t m = xv.rows(), n = xv.cols();
  if (rows.empty()) throw ShapeError("gather_rows: empty row list");
  Tensor y(Shape{rows.size(), n});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m) throw ShapeError("gather_rows: row index out of range");
    std::copy_n(xv.ptr() + rows[i] * n, n, y.ptr() + i * n);
  }
  auto saved = std::make_shared<std::vector<std::size_t>>(rows.begin(), rows.end());
  return x.graph().record(std::move(y), {x}, [x, saved](Graph& g, std::size_t self) {
    if (!g.requires_grad(x.id())) return;
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(x.id());
    const std::size_t n = gx.cols();
    for (std::size_t i = 0; i < saved->size(); ++i) {
      double* dst = gx.ptr() + (*saved)[i] * n;
      for (std::size_t c = 0; c < n; ++c) dst[c] += gy[i * n + c];
    }
  });
}

Var column(Var x, std::size_t c) {
  const Tensor& xv = x.value();
  require_rank2("column", xv);
  if (c >= xv.cols()) throw ShapeError("column: index out of range");
  const std::size_t m = xv.rows(), n = xv.cols();
  Tensor y(Shape{m});
  for (std::size_t r = 0; r < m; ++r) y[r] = xv[r * n + c];
  return x.graph().record(std::move(y), {x}, [x, c](Graph& g, std::size_t self) {
    if (!g.requires_grad(x.id())) return;
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(x.id());
    const std::size_t n = gx.cols();
    for (std::size_t r = 0; r < gy.numel(); ++r) gx[r * n + c] += gy[r];
  });
}

Var self_attention(Var qkv, const AttentionLayout& layout) {
  const Tensor& x = qkv.value();
  require_rank2("self_attention", x);
  const std::size_t B = layout.batch, T = layout.seq_len, H = layout.heads;
  if (B == 0 || T == 0 || H == 0 || x.rows() != B * T || x.cols() % (3 * H) != 0) {
    throw ShapeError("self_attention: layout does not match qkv shape " + shape_str(x.shape()));
  }
  if (layout.key_mask.size() != B * T) throw ShapeError("self_attention: key mask length mismatch");
  const std::size_t width = x.cols(), d = width / 3, dh = d / H;
  const std::size_t Tq = layout.first_query_only ? 1 : T;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  auto mask = std::make_shared<std::vector<std::uint8_t>>(layout.key_mask.begin(), layout.key_mask.end());
  // Keys past the last attendable one are skipped outright.
  auto key_len = std::make_shared<std::vector<std::size_t>>(B, 0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t j = 0; j < T; ++j) {
      if ((*mask)[b * T + j]) (*key_len)[b] = j + 1;
    }
    if ((*key_len)[b] == 0) throw ContractError("self_attention: sequence with no attendable key");
  }
  // probs[(b, h)] is a Tq x key_len[b] block, stored with row stride T.
  auto probs = std::make_shared<std::vector<double>>(B * H * Tq * T, 0.0);
  Tensor y(Shape{B * Tq, d});
  using Stride = Eigen::OuterStride<>;
  using CBlock = Eigen::Map<const RowMat, 0, Stride>;
  using Block = Eigen::Map<RowMat, 0, Stride>;
  const auto w = static_cast<Eigen::Index>(width);
  for (std::size_t b = 0; b < B; ++b) {
    const auto tk = static_cast<Eigen::Index>((*key_len)[b]);
    const double* base = x.ptr() + b * T * width;
    for (std::size_t h = 0; h < H; ++h) {
      CBlock q(base + h * dh, static_cast<Eigen::Index>(Tq), static_cast<Eigen::Index>(dh), Stride(w));
      CBlock k(base + d + h * dh, tk, static_cast<Eigen::Index>(dh), Stride(w));
      CBlock v(base + 2 * d + h * dh, tk, static_cast<Eigen::Index>(dh), Stride(w));
      Block p(probs->data() + (b * H + h) * Tq * T, static_cast<Eigen::Index>(Tq), tk,
              Stride(static_cast<Eigen::Index>(T)));
      p.noalias() = q * k.transpose();
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < tk; ++j) {
          if ((*mask)[b * T + static_cast<std::size_t>(j)]) mx = std::max(mx, p(i, j));
        }
        double z = 0.0;
        for (Eigen::Index j = 0; j < tk; ++j) {
          z += p(i, j) = (*mask)[b * T + static_cast<std::size_t>(j)] ? std::exp((p(i, j) - mx) * inv_sqrt) : 0.0;
        }
        p.row(i) /= z;
      }
      Block out(y.ptr() + b * Tq * d + h * dh, static_cast<Eigen::Index>(Tq), static_cast<Eigen::Index>(dh),
                Stride(static_cast<Eigen::Index>(d)));
      out.noalias() = p * v;
    }
  }

  return qkv.graph().record(
      std::move(y), {qkv}, [qkv, B, T, H, Tq, d, dh, width, inv_sqrt, key_len, probs](Graph& g, std::size_t self) {
        if (!g.requires_grad(qkv.id())) return;
        const Tensor& x = g.value(qkv.id());
        const Tensor& gy = g.grad_buffer(self);
        Tensor& gx = g.grad_buffer(qkv.id());
        const auto w = static_cast<Eigen::Index>(width);
        const auto tq = static_cast<Eigen::Index>(Tq), e = static_cast<Eigen::Index>(dh);
        RowMat dp, ds;
        for (std::size_t b = 0; b < B; ++b) {
          const auto tk = static_cast<Eigen::Index>((*key_len)[b]);
          const double* base = x.ptr() + b * T * width;
          double* gbase = gx.ptr() + b * T * width;
          for (std::size_t h = 0; h < H; ++h) {
            CBlock q(base + h * dh, tq, e, Stride(w));
            CBlock k(base + d + h * dh, tk, e, Stride(w));
            CBlock v(base + 2 * d + h * dh, tk, e, Stride(w));
            Block gq(gbase + h * dh, tq, e, Stride(w));
            Block gk(gbase + d + h * dh, tk, e, Stride(w));
            Block gv(gbase + 2 * d + h * dh, tk, e, Stride(w));
            CBlock p(probs->data() + (b * H + h) * Tq * T, tq, tk, Stride(static_cast<Eigen::Index>(T)));
            CBlock go(gy.ptr() + b * Tq * d + h * dh, tq, e, Stride(static_cast<Eigen::Index>(d)));
            gv.noalias() += p.transpose() * go;
            dp.noalias() = go * v.transpose();
            // Masked keys have p = 0, so they receive no score gradient.
            const Eigen::VectorXd row_dot = (dp.cwiseProduct(p)).rowwise().sum();
            ds = p.cwiseProduct(dp.colwise() - row_dot) * inv_sqrt;
            gq.noalias() += ds * k;
            gk.noalias() += ds.transpose() * q;
          }
        }
      });
}

}  // namespace xlt::num
