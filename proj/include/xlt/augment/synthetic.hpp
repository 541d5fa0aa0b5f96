// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xlt/augment/corpus.hpp"
#include "xlt/augment/translator.hpp"
#include "xlt/translit/cipher.hpp"
#include "xlt/translit/table.hpp"

namespace xlt::augment {

/// Knobs of the synthetic cross-lingual task. English sentences are labeled
/// positive iff they contain a crisis keyword; a constructed target language
/// written in Georgian letters supplies the translation, and a random cipher
/// to Latin letters supplies the transliteration.
struct SyntheticConfig {
  std::uint64_t seed = 7;
  std::size_t n_train = 2000;
  std::size_t n_val = 500;
  std::size_t n_test = 500;
  std::size_t min_words = 3;
  std::size_t max_words = 6;
  double positive_rate = 0.5;
  /// Leading entries of the built-in keyword and neutral word lists.
  std::size_t n_keywords = 8;
  std::size_t n_neutral = 24;
  /// Flip probability for train and validation labels; test labels stay clean.
  double label_noise = 0.0;
  /// Neutral words whose target form is one letter away from a keyword's.
  bool decoys = true;
};

struct SyntheticTask {
  DictionaryTranslator translator;
  translit::CipherKey cipher;
  translit::MappingTable table;
  std::vector<std::string> keywords;
  std::vector<LabeledExample> train, val, test;
  std::vector<ParallelTriplet> train_triplets, val_triplets, test_triplets;
};

SyntheticTask make_synthetic_task(const SyntheticConfig& config);

/// Writes {train,val,test}.jsonl (triplets), {train,val,test}_corpus.jsonl,
/// lexicon.tsv and cipher_table.tsv into `dir`.
void write_synthetic_task(const SyntheticTask& task, const std::filesystem::path& dir);

}  // namespace xlt::augment
