// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xlt/encoder/tokenizer.hpp"
#include "xlt/num/graph.hpp"
#include "xlt/num/tensor.hpp"

namespace xlt::enc {

struct EncoderConfig {
  std::size_t num_layers = 4;
  std::size_t hidden_dim = 64;
  std::size_t num_heads = 4;
  std::size_t ffn_dim = 128;
  std::size_t max_positions = 64;
  std::size_t freeze_depth = 0;

  /// Throws ContractError on an inconsistent configuration.
  void validate() const;
};

/// round(0.75 * L)
std::size_t default_freeze_depth(std::size_t num_layers);

struct Parameter {
  std::string name;
  num::Tensor value;
  bool trainable = true;
};

/// Pre-LN transformer with a two-logit head.
///
/// Parameter order: tok_emb, pos_emb, then 11 tensors per layer
/// (ln1_g, ln1_b, w_qkv, w_o, b_o, ln2_g, ln2_b, w_ff1, b_ff1, w_ff2, b_ff2),
/// then ln_g, ln_b, head_w, head_b.
class EncoderParams {
 public:
  static constexpr std::size_t kPerLayer = 11;

  static EncoderParams init(const EncoderConfig& config, std::size_t vocab_size,
                            std::uint64_t seed);

  const EncoderConfig& config() const { return config_; }
  std::size_t vocab_size() const { return vocab_size_; }

  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  const Parameter& get(std::string_view name) const;
  Parameter& get(std::string_view name);
  std::size_t numel() const;

  /// Freezes embeddings plus layers [0, k); everything above stays
  /// trainable. Throws ContractError unless 0 <= k <= L.
  void set_freeze_depth(std::size_t k);
  void freeze_all();

  /// Used by checkpoint loading.
  static EncoderParams assemble(EncoderConfig config, std::size_t vocab_size,
                                std::vector<Parameter> params);

 private:
  EncoderConfig config_;
  std::size_t vocab_size_ = 0;
  std::vector<Parameter> params_;
};

/// Deep copy with every parameter frozen.
EncoderParams make_teacher(const EncoderParams& student);

/// Graph leaves for each parameter, parallel to params(). A leaf requires
/// grad only if the parameter is trainable and `track_grads` is set.
std::vector<num::Var> bind(num::Graph& graph, const EncoderParams& params, bool track_grads = true);

struct ForwardVars {
  num::Var h;                         ///< [B, d] final-LN CLS vectors
  std::vector<num::Var> per_layer_cls;  ///< L+1 entries of [B, d]
  num::Var logits;                    ///< [B, 2]
  num::Var p_positive;                ///< [B]
};

/// Throws ShapeError if seq_len exceeds max_positions, ContractError if a
/// sequence does not start with CLS.
ForwardVars forward(const EncoderParams& params, std::span<const num::Var> bound,
                    const TokenBatch& batch);

struct EncoderOutput {
  std::vector<double> h;
  std::vector<std::vector<double>> per_layer_cls;
  std::vector<double> logits;
  double p_positive = 0.0;
};

/// Gradient-free evaluation, one output per sequence.
std::vector<EncoderOutput> encode(const EncoderParams& params, const TokenBatch& batch);
EncoderOutput encode(const EncoderParams& params, std::span<const std::int32_t> ids,
                     std::span<const std::uint8_t> mask);

/// p_positive for each text, evaluated in chunks of `batch_size`.
std::vector<double> predict_positive(const EncoderParams& params, const TokenizerSpec& tokenizer,
                                     std::span<const std::string> texts,
                                     std::size_t batch_size = 64);
/// CLS vectors h for each text, row-major [texts.size(), d].
num::Tensor encode_texts(const EncoderParams& params, const TokenizerSpec& tokenizer,
                         std::span<const std::string> texts, std::size_t batch_size = 64);

}  // namespace xlt::enc
