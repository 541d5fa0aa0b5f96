// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace xlt::augment {

struct LabeledExample {
  std::string id;
  std::string text;
  int label = 0;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// One source sentence with its translation and the transliterated
/// translation.
struct ParallelTriplet {
  std::string id;
  std::string src;
  std::string tr;
  std::string tl;
  int label = 0;

  friend bool operator==(const ParallelTriplet&, const ParallelTriplet&) = default;
};

/// JSONL with fields id, text, label. Blank lines are skipped. Throws
/// LoadError naming the line on malformed input, a label other than 0/1, or
/// blank text, and "empty corpus" when nothing was read.
std::vector<LabeledExample> read_corpus(std::istream& in, const std::string& name = "corpus");
std::vector<LabeledExample> read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const std::vector<LabeledExample>& corpus);
void write_corpus(const std::filesystem::path& path, const std::vector<LabeledExample>& corpus);

/// JSONL with fields id, src, tr, tl, label.
std::vector<ParallelTriplet> read_triplets(std::istream& in, const std::string& name = "triplets");
std::vector<ParallelTriplet> read_triplets(const std::filesystem::path& path);
void write_triplets(std::ostream& out, const std::vector<ParallelTriplet>& triplets);
void write_triplets(const std::filesystem::path& path, const std::vector<ParallelTriplet>& triplets);

}  // namespace xlt::augment
