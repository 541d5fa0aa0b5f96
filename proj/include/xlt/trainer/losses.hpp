// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "xlt/num/graph.hpp"
#include "xlt/num/tensor.hpp"

namespace xlt::train {

struct LossWeights {
  double alpha = 0.3;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double beta3 = 1.0;

  /// Throws ContractError on a negative weight.
  void validate() const;
};

struct BatchLosses {
  double l_ts = 0.0;
  double l_tr = 0.0;
  double l_tl = 0.0;
  double l_u = 0.0;
  double j_joint = 0.0;
  double total = 0.0;
};

struct AlignmentVars {
  num::Var l_ts, l_tr, l_tl, l_u;
};

/// Mean cosine distances from the teacher's source vectors to the student's
/// source, translated and transliterated vectors, and their weighted sum.
/// `teacher_h_src` should be a constant leaf; ShapeError on size mismatch.
AlignmentVars alignment_loss(num::Var teacher_h_src, num::Var student_h_src,
                             num::Var student_h_tr, num::Var student_h_tl, const LossWeights& w);

/// BCE(p_src) + BCE(p_tr) + BCE(p_tl).
num::Var joint_classification_loss(num::Var p_src, num::Var p_tr, num::Var p_tl,
                                   std::span<const double> labels);

/// j_joint + alpha * l_u. ContractError if alpha < 0.
num::Var total_loss(num::Var j_joint, num::Var l_u, double alpha);
double total_loss(double j_joint, double l_u, double alpha);

/// Gradient-free evaluation over [N, d] tensors.
BatchLosses alignment_loss(const num::Tensor& teacher_h_src, const num::Tensor& student_h_src,
                           const num::Tensor& student_h_tr, const num::Tensor& student_h_tl,
                           const LossWeights& w);
double joint_classification_loss(std::span<const double> p_src, std::span<const double> p_tr,
                                 std::span<const double> p_tl, std::span<const double> labels);

}  // namespace xlt::train
