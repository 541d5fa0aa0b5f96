// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "xlt/augment/corpus.hpp"
#include "xlt/translit/table.hpp"

namespace xlt::augment {

class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::string translate(std::string_view text) const = 0;
};

class IdentityTranslator final : public Translator {
 public:
  std::string translate(std::string_view text) const override { return std::string(text); }
};

/// Word-by-word substitution. Each whitespace-delimited token is split into
/// leading punctuation, a core and trailing punctuation; the core is looked
/// up with ASCII case folding and replaced if found. Whitespace and
/// punctuation are kept as is.
class DictionaryTranslator final : public Translator {
 public:
  DictionaryTranslator() = default;
  /// Throws ContractError if two entries fold to the same key.
  explicit DictionaryTranslator(const std::vector<std::pair<std::string, std::string>>& entries);

  /// `source<TAB>target` lines, `#` comments. Duplicates raise LoadError
  /// naming the line.
  static DictionaryTranslator load(std::istream& in, const std::string& name = "lexicon");
  static DictionaryTranslator load_file(const std::filesystem::path& path);
  void save(std::ostream& out) const;

  std::size_t size() const { return lexicon_.size(); }
  const std::map<std::string, std::string>& lexicon() const { return lexicon_; }

  std::string translate(std::string_view text) const override;

 private:
  std::map<std::string, std::string> lexicon_;
};

std::string fold_case(std::string_view word);

/// tl = transliterate(translate(src)); ids, order and labels preserved.
/// Throws ContractError on an empty corpus.
std::vector<ParallelTriplet> build_triplets(const std::vector<LabeledExample>& corpus,
                                            const Translator& translator,
                                            const translit::MappingTable& table);

}  // namespace xlt::augment
