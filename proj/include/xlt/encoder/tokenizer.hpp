// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlt::enc {

/// Character-level vocabulary. Ids 0..2 are reserved; characters follow in
/// codepoint order.
struct TokenizerSpec {
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kCls = 1;
  static constexpr std::int32_t kUnk = 2;
  static constexpr std::int32_t kFirstChar = 3;

  std::map<char32_t, std::int32_t> vocabulary;
  std::size_t max_sequence_length = 64;

  std::size_t vocab_size() const { return kFirstChar + vocabulary.size(); }

  /// Every codepoint seen in `texts` gets an id.
  static TokenizerSpec build(std::span<const std::string> texts, std::size_t max_sequence_length);
  static TokenizerSpec from_codepoints(std::u32string_view codepoints,
                                       std::size_t max_sequence_length);
  /// Vocabulary codepoints in id order.
  std::u32string codepoints() const;
};

/// [CLS] followed by one id per codepoint, truncated to max_sequence_length.
std::vector<std::int32_t> tokenize(std::string_view text, const TokenizerSpec& spec);

/// Right-padded id matrix; mask is 1 on real tokens and 0 on PAD.
struct TokenBatch {
  std::size_t batch = 0;
  std::size_t seq_len = 0;
  std::vector<std::int32_t> ids;
  std::vector<std::uint8_t> mask;
};

/// Pads to the longest sequence. Throws ContractError on an empty list or an
/// empty sequence.
TokenBatch make_batch(std::span<const std::vector<std::int32_t>> sequences);
TokenBatch tokenize_batch(std::span<const std::string> texts, const TokenizerSpec& spec);

}  // namespace xlt::enc
