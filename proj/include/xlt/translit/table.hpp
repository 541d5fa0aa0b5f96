// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xlt::translit {

/// What happens to the inherent vowel of a word-final bare consonant.
enum class SchwaPolicy {
  retain,   ///< always keep it ("sandarbha", "madada")
  cluster,  ///< drop it unless the consonant closes a conjunct ("madad", "sandarbha")
  final,    ///< always drop it ("madad", "sandarbh")
};

std::string_view to_string(SchwaPolicy policy);
SchwaPolicy parse_schwa_policy(std::string_view text);

struct Rule {
  std::u32string source;
  std::string replacement;
  std::size_t line = 0;  ///< 1-based line in the rule file, 0 if built in code
};

/// Ordered grapheme -> Latin rewrite rules.
///
/// Rules are kept longest-source-first (ties in file order). Sources must be
/// unique and free of ASCII; replacements use only [a-zA-Z'~.-]. Together
/// these make transliteration idempotent. Unmapped codepoints pass through.
///
/// Inherent vowels are discovered from the data: a rule `S -> Xa` carries a
/// schwa when the table also has `S + c -> X` for one extra codepoint c (the
/// virama form); the latter is a "dead" consonant.
class MappingTable {
 public:
  MappingTable() = default;

  static MappingTable from_rules(std::string name, std::vector<Rule> rules,
                                 SchwaPolicy policy = SchwaPolicy::retain);
  /// Parses `source<TAB>replacement` lines. `#` starts a comment line; the
  /// comment `#!schwa=<retain|cluster|final>` sets the table's policy.
  static MappingTable load(std::istream& in, std::string name);
  static MappingTable load_file(const std::filesystem::path& path);

  const std::string& name() const { return name_; }
  std::span<const Rule> rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  SchwaPolicy schwa_policy() const { return policy_; }
  void set_schwa_policy(SchwaPolicy policy) { policy_ = policy; }

  /// Index of the longest rule matching `text` at `pos`.
  std::optional<std::size_t> match(std::u32string_view text, std::size_t pos) const;

  bool schwa_bearing(std::size_t rule) const { return traits_[rule].schwa; }
  bool dead_consonant(std::size_t rule) const { return traits_[rule].dead; }
  bool conjunct(std::size_t rule) const { return traits_[rule].conjunct; }
  bool letter_bearing(std::size_t rule) const { return traits_[rule].letter; }

 private:
  struct Traits {
    bool schwa = false;
    bool dead = false;
    bool conjunct = false;
    bool letter = false;
  };

  void index();

  std::string name_;
  std::vector<Rule> rules_;
  std::vector<Traits> traits_;
  SchwaPolicy policy_ = SchwaPolicy::retain;
  std::unordered_map<char32_t, std::vector<std::size_t>> by_first_;
};

struct TransliterationResult {
  std::string output;
  std::size_t unmapped_count = 0;
  /// Parallel to MappingTable::rules().
  std::vector<std::size_t> rule_hits;
};

TransliterationResult transliterate(std::string_view text, const MappingTable& table);

}  // namespace xlt::translit
