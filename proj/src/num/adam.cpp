// SPDX-License-Identifier: Apache-2.0
#include "xlt/num/adam.hpp"

#include <cmath>
#include <string>

#include "xlt/error.hpp"

namespace xlt::num {

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  }
  if (state.m.empty() && state.t == 0) {
    for (const Tensor* p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state tracks a different parameter count");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != grads[i].shape() || state.m[i].shape() != grads[i].shape()) {
      throw ShapeError("adam_step: shape mismatch at parameter " + std::to_string(i) + ": " +
                       shape_str(params[i]->shape()) + " vs gradient " + shape_str(grads[i].shape()));
    }
  }

  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    const Tensor& g = grads[i];
    for (std::size_t j = 0; j < p.numel(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p[j] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace xlt::num
