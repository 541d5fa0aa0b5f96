// SPDX-License-Identifier: Apache-2.0
#include "xlt/encoder/tokenizer.hpp"

#include <algorithm>
#include <set>

#include "xlt/error.hpp"
#include "xlt/utf8.hpp"

namespace xlt::enc {

TokenizerSpec TokenizerSpec::from_codepoints(std::u32string_view codepoints,
                                             std::size_t max_sequence_length) {
  if (max_sequence_length < 1) throw ContractError("max_sequence_length must be positive");
  std::set<char32_t> sorted(codepoints.begin(), codepoints.end());
  TokenizerSpec spec;
  spec.max_sequence_length = max_sequence_length;
  std::int32_t next = kFirstChar;
  for (char32_t cp : sorted) spec.vocabulary.emplace(cp, next++);
  return spec;
}

TokenizerSpec TokenizerSpec::build(std::span<const std::string> texts,
                                   std::size_t max_sequence_length) {
  std::u32string all;
  for (const auto& t : texts) all += decode_utf8(t);
  return from_codepoints(all, max_sequence_length);
}

std::u32string TokenizerSpec::codepoints() const {
  std::u32string out(vocabulary.size(), U'\0');
  for (auto [cp, id] : vocabulary) out[static_cast<std::size_t>(id - kFirstChar)] = cp;
  return out;
}

std::vector<std::int32_t> tokenize(std::string_view text, const TokenizerSpec& spec) {
  std::vector<std::int32_t> ids{TokenizerSpec::kCls};
  for (char32_t cp : decode_utf8(text)) {
    if (ids.size() >= spec.max_sequence_length) break;
    auto it = spec.vocabulary.find(cp);
    ids.push_back(it == spec.vocabulary.end() ? TokenizerSpec::kUnk : it->second);
  }
  return ids;
}

TokenBatch make_batch(std::span<const std::vector<std::int32_t>> sequences) {
  if (sequences.empty()) throw ContractError("make_batch: no sequences");
  TokenBatch b;
  b.batch = sequences.size();
  for (const auto& s : sequences) {
    if (s.empty()) throw ContractError("make_batch: empty sequence");
    b.seq_len = std::max(b.seq_len, s.size());
  }
  b.ids.assign(b.batch * b.seq_len, TokenizerSpec::kPad);
  b.mask.assign(b.batch * b.seq_len, 0);
  for (std::size_t i = 0; i < b.batch; ++i) {
    std::copy(sequences[i].begin(), sequences[i].end(), b.ids.begin() + i * b.seq_len);
    std::fill_n(b.mask.begin() + i * b.seq_len, sequences[i].size(), 1);
  }
  return b;
}

TokenBatch tokenize_batch(std::span<const std::string> texts, const TokenizerSpec& spec) {
  std::vector<std::vector<std::int32_t>> seqs;
  seqs.reserve(texts.size());
  for (const auto& t : texts) seqs.push_back(tokenize(t, spec));
  return make_batch(seqs);
}

}  // namespace xlt::enc
