// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xlt/augment/corpus.hpp"
#include "xlt/encoder/encoder.hpp"
#include "xlt/eval/metrics.hpp"
#include "xlt/num/tensor.hpp"
#include "xlt/trainer/config.hpp"

namespace xlt::eval {

/// Mean cosine distances over a set of parallel triplets.
struct AlignmentReport {
  double src_tr = 0.0;
  double src_tl = 0.0;
  double tr_tl = 0.0;
  double teacher_src_student_src = 0.0;
  double teacher_src_student_tr = 0.0;
  double teacher_src_student_tl = 0.0;
  std::size_t n = 0;
};

AlignmentReport alignment_diagnostics(const enc::EncoderParams& teacher,
                                      const enc::EncoderParams& student,
                                      const enc::TokenizerSpec& tokenizer,
                                      std::span<const augment::ParallelTriplet> triplets);

std::string to_json(const AlignmentReport& r);
std::string to_json(const MetricsReport& r);

/// Thresholds p(positive) at 0.5 on one variant of the triplets.
MetricsReport evaluate_model(const enc::EncoderParams& params, const enc::TokenizerSpec& tokenizer,
                             std::span<const augment::ParallelTriplet> triplets,
                             train::Variant variant);

struct ProjectedPoint {
  double x = 0.0;
  double y = 0.0;
  std::string tag;
};

/// Mean-centred projection of the rows of `vectors` onto the two leading
/// principal directions. Each axis is signed so that its largest-magnitude
/// loading is positive. Throws ContractError for fewer than 2 rows.
std::vector<ProjectedPoint> project2d(const num::Tensor& vectors, std::span<const std::string> tags);

/// CSV with header x,y,tag.
std::string projection_csv(std::span<const ProjectedPoint> points);

struct SweepRow {
  std::size_t k = 0;
  double weighted_f1 = 0.0;
};

/// One model per freeze depth, same seed and data; scores the test split on
/// `test_variant`.
std::vector<SweepRow> freeze_sweep(std::span<const augment::ParallelTriplet> train_set,
                                   std::span<const augment::ParallelTriplet> val_set,
                                   std::span<const augment::ParallelTriplet> test_set,
                                   const train::TrainConfig& cfg,
                                   std::span<const std::size_t> k_values,
                                   train::Variant test_variant = train::Variant::tl);

std::string sweep_jsonl(std::span<const SweepRow> rows);

}  // namespace xlt::eval
