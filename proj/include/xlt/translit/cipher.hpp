// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xlt/translit/table.hpp"

namespace xlt::translit {

/// Bijective codepoint substitution over a finite alphabet.
class CipherKey {
 public:
  /// Throws ContractError unless `pairs` is a bijection.
  static CipherKey from_pairs(const std::vector<std::pair<char32_t, char32_t>>& pairs);
  /// Maps from[i] -> to[i]; both must be duplicate-free and equally long.
  static CipherKey between(std::u32string_view from, std::u32string_view to);
  static CipherKey identity(std::u32string_view alphabet);
  static CipherKey rotation(std::u32string_view alphabet, std::size_t shift);
  /// Uniform random permutation of `alphabet`.
  static CipherKey random(std::u32string_view alphabet, std::uint64_t seed);

  std::size_t size() const { return fwd_.size(); }
  std::u32string domain() const;
  bool contains(char32_t cp) const { return fwd_.count(cp) != 0; }

  char32_t forward(char32_t cp) const;
  char32_t inverse(char32_t cp) const;

  /// Rules for every non-ASCII domain codepoint; images must be valid
  /// replacement characters.
  MappingTable to_table(std::string name) const;

 private:
  std::map<char32_t, char32_t> fwd_;
  std::map<char32_t, char32_t> inv_;
};

std::string cipher_transliterate(std::string_view text, const CipherKey& key);
std::string cipher_inverse(std::string_view text, const CipherKey& key);

}  // namespace xlt::translit
