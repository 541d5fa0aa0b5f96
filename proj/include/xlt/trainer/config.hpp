// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "xlt/encoder/encoder.hpp"
#include "xlt/trainer/losses.hpp"

namespace xlt::train {

enum class Mode { en, tr, tl, en_tr_tl, joint, joint_ts };
enum class Variant { src, tr, tl };

std::string_view to_string(Mode mode);
std::string_view to_string(Variant variant);
/// Accepts en, tr, tl, en+tr+tl, joint, joint_ts. ContractError otherwise.
Mode parse_mode(std::string_view text);
/// Accepts src (alias en), tr, tl.
Variant parse_variant(std::string_view text);

/// Modes that train on aligned triplets with a teacher.
inline bool uses_teacher(Mode m) { return m == Mode::joint || m == Mode::joint_ts; }

struct TrainConfig {
  Mode mode = Mode::joint_ts;
  LossWeights weights;
  std::size_t freeze_depth = 0;
  std::size_t max_epochs = 40;
  std::size_t patience = 10;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  std::size_t teacher_warmup_epochs = 3;
  Variant val_variant = Variant::tl;
  enc::EncoderConfig encoder;
  std::size_t max_sequence_length = 64;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  /// alpha as used by the optimizer: 0 in joint mode.
  double effective_alpha() const { return mode == Mode::joint ? 0.0 : weights.alpha; }
  /// Throws ContractError on inconsistent values.
  void validate() const;
};

/// Flat `key = value` lines; `#` starts a comment. Keys are the field names
/// above, with loss weights as alpha/beta1/beta2/beta3 and encoder fields as
/// num_layers/hidden_dim/num_heads/ffn_dim/max_positions. Unknown keys,
/// repeated keys and bad values raise LoadError naming the line.
TrainConfig parse_config(std::istream& in, const std::string& name = "config");
TrainConfig load_config(const std::filesystem::path& path);
/// Inverse of parse_config; every key is written.
std::string format_config(const TrainConfig& cfg);

}  // namespace xlt::train
