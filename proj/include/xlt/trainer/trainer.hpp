// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xlt/augment/corpus.hpp"
#include "xlt/encoder/encoder.hpp"
#include "xlt/encoder/tokenizer.hpp"
#include "xlt/num/adam.hpp"
#include "xlt/num/gradcheck.hpp"
#include "xlt/trainer/config.hpp"
#include "xlt/trainer/losses.hpp"

namespace xlt::train {

using augment::ParallelTriplet;

const std::string& text_of(const ParallelTriplet& t, Variant v);
std::vector<std::string> texts_of(std::span<const ParallelTriplet> triplets, Variant v);
std::vector<double> labels_of(std::span<const ParallelTriplet> triplets);

/// Vocabulary over all three columns of the training triplets.
enc::TokenizerSpec build_tokenizer(std::span<const ParallelTriplet> triplets,
                                   std::size_t max_sequence_length);

num::AdamState make_adam(const TrainConfig& cfg);

/// One Adam step on BCE over independent examples (baseline modes and the
/// teacher warm-up). Only the l_* fields stay zero; j_joint == total.
BatchLosses classification_step(enc::EncoderParams& student, const enc::TokenizerSpec& tokenizer,
                                std::span<const std::string> texts,
                                std::span<const double> labels, num::AdamState& adam);

struct ObjectiveVars {
  num::Var l_ts, l_tr, l_tl, l_u, j_joint, total;
};

/// Builds the joint objective for a batch on an already bound student.
/// `teacher_h_src` is [B, d] and should be a constant leaf.
ObjectiveVars joint_objective(const enc::EncoderParams& student, std::span<const num::Var> vars,
                              std::span<const ParallelTriplet> batch, num::Var teacher_h_src,
                              const enc::TokenizerSpec& tokenizer, const TrainConfig& cfg);

/// Finite-difference check of the whole student pipeline (tokens through the
/// encoder to the joint objective) on random 2-layer, width-8 encoders.
num::GradCheckReport check_pipeline(std::uint64_t seed, int instances, double eps, double tol);

/// One Adam step of the joint objective on aligned triplets. `teacher_h_src`
/// holds the frozen teacher's source vectors [B, d] and enters the graph as a
/// constant. In joint mode the alignment terms are computed for logging but
/// are not part of the optimized loss.
BatchLosses train_step(std::span<const ParallelTriplet> batch, const num::Tensor& teacher_h_src,
                       enc::EncoderParams& student, const enc::TokenizerSpec& tokenizer,
                       const TrainConfig& cfg, num::AdamState& adam);
BatchLosses train_step(std::span<const ParallelTriplet> batch, const enc::EncoderParams& teacher,
                       enc::EncoderParams& student, const enc::TokenizerSpec& tokenizer,
                       const TrainConfig& cfg, num::AdamState& adam);

struct ValidationScore {
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
};

/// Called after every epoch (1-based) with the current student.
using ValidationHook = std::function<ValidationScore(std::size_t epoch, const enc::EncoderParams&)>;

struct EpochRecord {
  std::size_t epoch = 0;
  BatchLosses losses;  ///< mean over the epoch's batches
  double val_accuracy = 0.0;
  double val_weighted_f1 = 0.0;
};

struct TrainResult {
  enc::TokenizerSpec tokenizer;
  enc::EncoderParams best;  ///< student at best_epoch
  std::optional<enc::EncoderParams> teacher;
  std::optional<enc::EncoderParams> warm_start;
  std::vector<EpochRecord> history;
  std::vector<BatchLosses> batch_log;
  std::size_t best_epoch = 0;
  ValidationScore best_score;
};

/// Weighted F1 (accuracy breaks ties) on the configured variant.
ValidationScore validate(const enc::EncoderParams& params, const enc::TokenizerSpec& tokenizer,
                         std::span<const ParallelTriplet> val, Variant variant);

/// Full training run: optional teacher warm-up, then epochs until
/// max_epochs or `patience` epochs without strict improvement. Deterministic
/// in cfg.seed (init) and cfg.seed + 1 (shuffling). ContractError on empty
/// data. A hook replaces the built-in validation.
TrainResult train(std::span<const ParallelTriplet> train_set, std::span<const ParallelTriplet> val_set,
                  const TrainConfig& cfg, const ValidationHook& hook = {},
                  const std::optional<enc::TokenizerSpec>& tokenizer = std::nullopt);

std::string history_jsonl(std::span<const EpochRecord> history);

}  // namespace xlt::train
