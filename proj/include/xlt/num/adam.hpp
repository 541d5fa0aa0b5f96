// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xlt/num/tensor.hpp"

namespace xlt::num {

/// Moments are allocated on the first step and must keep their shapes afterwards.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t t = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

/// One bias-corrected Adam update, in place. Only trainable parameters belong here.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state);

}  // namespace xlt::num
