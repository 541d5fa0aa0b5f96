// SPDX-License-Identifier: Apache-2.0
#include "xlt/trainer/losses.hpp"

#include <string>

#include "xlt/error.hpp"
#include "xlt/num/losses.hpp"
#include "xlt/num/ops.hpp"

namespace xlt::train {

using num::Var;

void LossWeights::validate() const {
  if (alpha < 0 || beta1 < 0 || beta2 < 0 || beta3 < 0) {
    throw ContractError("loss weights must be non-negative");
  }
}

AlignmentVars alignment_loss(Var teacher_h_src, Var student_h_src, Var student_h_tr,
                             Var student_h_tl, const LossWeights& w) {
  w.validate();
  const auto& shape = teacher_h_src.shape();
  for (Var v : {student_h_src, student_h_tr, student_h_tl}) {
    if (v.shape() != shape) {
      throw ShapeError("alignment_loss: " + num::shape_str(v.shape()) + " vs teacher " +
                       num::shape_str(shape));
    }
  }
  AlignmentVars out;
  out.l_ts = num::mean(num::cosine_distance_rows(teacher_h_src, student_h_src));
  out.l_tr = num::mean(num::cosine_distance_rows(teacher_h_src, student_h_tr));
  out.l_tl = num::mean(num::cosine_distance_rows(teacher_h_src, student_h_tl));
  out.l_u = num::add(num::add(num::scale(out.l_ts, w.beta1), num::scale(out.l_tr, w.beta2)),
                     num::scale(out.l_tl, w.beta3));
  return out;
}

Var joint_classification_loss(Var p_src, Var p_tr, Var p_tl, std::span<const double> labels) {
  return num::add(num::add(num::bce_loss(p_src, labels), num::bce_loss(p_tr, labels)),
                  num::bce_loss(p_tl, labels));
}

Var total_loss(Var j_joint, Var l_u, double alpha) {
  if (alpha < 0) throw ContractError("alpha must be non-negative");
  return num::add(j_joint, num::scale(l_u, alpha));
}

double total_loss(double j_joint, double l_u, double alpha) {
  if (alpha < 0) throw ContractError("alpha must be non-negative");
  return j_joint + alpha * l_u;
}

BatchLosses alignment_loss(const num::Tensor& teacher_h_src, const num::Tensor& student_h_src,
                           const num::Tensor& student_h_tr, const num::Tensor& student_h_tl,
                           const LossWeights& w) {
  num::Graph g(false);
  auto a = alignment_loss(g.leaf(teacher_h_src), g.leaf(student_h_src), g.leaf(student_h_tr),
                          g.leaf(student_h_tl), w);
  BatchLosses out;
  out.l_ts = a.l_ts.value().item();
  out.l_tr = a.l_tr.value().item();
  out.l_tl = a.l_tl.value().item();
  out.l_u = a.l_u.value().item();
  return out;
}

double joint_classification_loss(std::span<const double> p_src, std::span<const double> p_tr,
                                 std::span<const double> p_tl, std::span<const double> labels) {
  if (p_src.size() != labels.size() || p_tr.size() != labels.size() ||
      p_tl.size() != labels.size()) {
    throw ShapeError("joint_classification_loss: batch sizes differ");
  }
  return num::bce_loss(p_src, labels) + num::bce_loss(p_tr, labels) + num::bce_loss(p_tl, labels);
}

}  // namespace xlt::train
