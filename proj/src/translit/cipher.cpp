// SPDX-License-Identifier: Apache-2.0
#include "xlt/translit/cipher.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "xlt/error.hpp"
#include "xlt/utf8.hpp"

namespace xlt::translit {

namespace {

std::string cp_str(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

}  // namespace

CipherKey CipherKey::from_pairs(const std::vector<std::pair<char32_t, char32_t>>& pairs) {
  CipherKey k;
  for (auto [a, b] : pairs) {
    if (!k.fwd_.emplace(a, b).second) throw ContractError("cipher key maps " + cp_str(a) + " twice");
    if (!k.inv_.emplace(b, a).second) {
      throw ContractError("cipher key is not injective at image " + cp_str(b));
    }
  }
  return k;
}

CipherKey CipherKey::between(std::u32string_view from, std::u32string_view to) {
  if (from.size() != to.size()) throw ContractError("cipher alphabets differ in size");
  std::vector<std::pair<char32_t, char32_t>> pairs;
  for (std::size_t i = 0; i < from.size(); ++i) pairs.emplace_back(from[i], to[i]);
  return from_pairs(pairs);
}

CipherKey CipherKey::identity(std::u32string_view alphabet) { return between(alphabet, alphabet); }

CipherKey CipherKey::rotation(std::u32string_view alphabet, std::size_t shift) {
  std::u32string to(alphabet);
  if (!to.empty()) std::rotate(to.begin(), to.begin() + static_cast<long>(shift % to.size()), to.end());
  return between(alphabet, to);
}

CipherKey CipherKey::random(std::u32string_view alphabet, std::uint64_t seed) {
  std::u32string to(alphabet);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with explicit draws so the permutation is library-independent.
  for (std::size_t i = to.size(); i > 1; --i) {
    std::swap(to[i - 1], to[rng() % i]);
  }
  return between(alphabet, to);
}

std::u32string CipherKey::domain() const {
  std::u32string d;
  for (const auto& kv : fwd_) d.push_back(kv.first);
  return d;
}

char32_t CipherKey::forward(char32_t cp) const {
  auto it = fwd_.find(cp);
  if (it == fwd_.end()) throw ContractError("codepoint " + cp_str(cp) + " outside cipher domain");
  return it->second;
}

char32_t CipherKey::inverse(char32_t cp) const {
  auto it = inv_.find(cp);
  if (it == inv_.end()) throw ContractError("codepoint " + cp_str(cp) + " outside cipher range");
  return it->second;
}

MappingTable CipherKey::to_table(std::string name) const {
  std::vector<Rule> rules;
  for (auto [a, b] : fwd_) {
    if (is_ascii(a)) continue;
    if (!is_ascii(b)) throw ContractError("cipher image " + cp_str(b) + " is not ASCII");
    rules.push_back(Rule{std::u32string(1, a), std::string(1, static_cast<char>(b)), 0});
  }
  return MappingTable::from_rules(std::move(name), std::move(rules));
}

std::string cipher_transliterate(std::string_view text, const CipherKey& key) {
  std::string out;
  for (char32_t cp : decode_utf8(text)) append_utf8(out, key.forward(cp));
  return out;
}

std::string cipher_inverse(std::string_view text, const CipherKey& key) {
  std::string out;
  for (char32_t cp : decode_utf8(text)) append_utf8(out, key.inverse(cp));
  return out;
}

}  // namespace xlt::translit
