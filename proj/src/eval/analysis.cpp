// SPDX-License-Identifier: Apache-2.0
#include "xlt/eval/analysis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "xlt/error.hpp"
#include "xlt/num/losses.hpp"
#include "xlt/trainer/trainer.hpp"

namespace xlt::eval {

using augment::ParallelTriplet;
using num::Tensor;
using train::Variant;

namespace {

double mean_distance(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.rows(), d = a.cols();
  double sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sum += num::cosine_distance({a.ptr() + r * d, d}, {b.ptr() + r * d, d});
  }
  return sum / static_cast<double>(n);
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

AlignmentReport alignment_diagnostics(const enc::EncoderParams& teacher,
                                      const enc::EncoderParams& student,
                                      const enc::TokenizerSpec& tokenizer,
                                      std::span<const ParallelTriplet> triplets) {
  if (triplets.empty()) throw ContractError("alignment_diagnostics: no triplets");
  const Tensor t = enc::encode_texts(teacher, tokenizer, train::texts_of(triplets, Variant::src));
  const Tensor s = enc::encode_texts(student, tokenizer, train::texts_of(triplets, Variant::src));
  const Tensor r = enc::encode_texts(student, tokenizer, train::texts_of(triplets, Variant::tr));
  const Tensor l = enc::encode_texts(student, tokenizer, train::texts_of(triplets, Variant::tl));
  AlignmentReport out;
  out.src_tr = mean_distance(s, r);
  out.src_tl = mean_distance(s, l);
  out.tr_tl = mean_distance(r, l);
  out.teacher_src_student_src = mean_distance(t, s);
  out.teacher_src_student_tr = mean_distance(t, r);
  out.teacher_src_student_tl = mean_distance(t, l);
  out.n = triplets.size();
  return out;
}

std::string to_json(const AlignmentReport& r) {
  nlohmann::ordered_json j{{"src_tr", r.src_tr},
                           {"src_tl", r.src_tl},
                           {"tr_tl", r.tr_tl},
                           {"teacher_src_student_src", r.teacher_src_student_src},
                           {"teacher_src_student_tr", r.teacher_src_student_tr},
                           {"teacher_src_student_tl", r.teacher_src_student_tl},
                           {"n", r.n}};
  return j.dump(2) + '\n';
}

std::string to_json(const MetricsReport& r) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& s = r.per_class[c];
    classes.push_back({{"label", c},
                       {"precision", s.precision},
                       {"recall", s.recall},
                       {"f1", s.f1},
                       {"support", s.support}});
  }
  nlohmann::ordered_json j{{"accuracy", r.accuracy},
                           {"weighted_f1", r.weighted_f1},
                           {"n", r.n},
                           {"per_class", classes}};
  return j.dump(2) + '\n';
}

MetricsReport evaluate_model(const enc::EncoderParams& params, const enc::TokenizerSpec& tokenizer,
                             std::span<const ParallelTriplet> triplets, Variant variant) {
  const auto probs = enc::predict_positive(params, tokenizer, train::texts_of(triplets, variant));
  std::vector<int> preds(probs.size()), labels(triplets.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    preds[i] = probs[i] > 0.5 ? 1 : 0;
    labels[i] = triplets[i].label;
  }
  return evaluate(preds, labels);
}

std::vector<ProjectedPoint> project2d(const Tensor& vectors, std::span<const std::string> tags) {
  if (vectors.rank() != 2 || vectors.rows() < 2) {
    throw ContractError("project2d: need at least 2 vectors");
  }
  if (tags.size() != vectors.rows()) {
    throw ShapeError("project2d: " + std::to_string(tags.size()) + " tags for " +
                     std::to_string(vectors.rows()) + " vectors");
  }
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Index n = static_cast<Eigen::Index>(vectors.rows());
  const Eigen::Index d = static_cast<Eigen::Index>(vectors.cols());
  RowMat x = Eigen::Map<const RowMat>(vectors.ptr(), n, d);
  x.rowwise() -= x.colwise().mean();

  Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(d, 2);
  if (d == 1) {
    axes(0, 0) = 1.0;
  } else {
    const Eigen::MatrixXd cov = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    // Eigenvalues come out ascending.
    axes.col(0) = eig.eigenvectors().col(d - 1);
    axes.col(1) = eig.eigenvectors().col(d - 2);
    for (int c = 0; c < 2; ++c) {
      Eigen::Index arg = 0;
      axes.col(c).cwiseAbs().maxCoeff(&arg);
      if (axes(arg, c) < 0) axes.col(c) = -axes.col(c);
    }
  }
  const Eigen::MatrixXd y = x * axes;
  std::vector<ProjectedPoint> out;
  out.reserve(vectors.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.push_back({y(i, 0), y(i, 1), tags[static_cast<std::size_t>(i)]});
  }
  return out;
}

std::string projection_csv(std::span<const ProjectedPoint> points) {
  std::string out = "x,y,tag\n";
  for (const auto& p : points) out += number(p.x) + ',' + number(p.y) + ',' + p.tag + '\n';
  return out;
}

std::vector<SweepRow> freeze_sweep(std::span<const ParallelTriplet> train_set,
                                   std::span<const ParallelTriplet> val_set,
                                   std::span<const ParallelTriplet> test_set,
                                   const train::TrainConfig& cfg,
                                   std::span<const std::size_t> k_values, Variant test_variant) {
  if (test_set.empty()) throw ContractError("freeze_sweep: empty test set");
  for (std::size_t k : k_values) {
    if (k > cfg.encoder.num_layers) {
      throw ContractError("freeze_sweep: k=" + std::to_string(k) + " outside [0, " +
                          std::to_string(cfg.encoder.num_layers) + "]");
    }
  }
  std::vector<SweepRow> rows;
  for (std::size_t k : k_values) {
    train::TrainConfig c = cfg;
    c.freeze_depth = k;
    auto r = train::train(train_set, val_set, c);
    rows.push_back({k, evaluate_model(r.best, r.tokenizer, test_set, test_variant).weighted_f1});
  }
  return rows;
}

std::string sweep_jsonl(std::span<const SweepRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j{{"k", r.k}, {"weighted_f1", r.weighted_f1}};
    out += j.dump() + '\n';
  }
  return out;
}

}  // namespace xlt::eval
