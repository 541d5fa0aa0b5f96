// SPDX-License-Identifier: Apache-2.0
#include "xlt/augment/translator.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "xlt/error.hpp"

namespace xlt::augment {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && u > 0x20 && !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                                   (c >= '0' && c <= '9') || u == 0x7F);
}

}  // namespace

std::string fold_case(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

DictionaryTranslator::DictionaryTranslator(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [src, tgt] : entries) {
    if (!lexicon_.emplace(fold_case(src), tgt).second) {
      throw ContractError("duplicate lexicon entry '" + src + "'");
    }
  }
}

DictionaryTranslator DictionaryTranslator::load(std::istream& in, const std::string& name) {
  DictionaryTranslator t;
  std::map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    const std::string where = name + ":" + std::to_string(lineno) + ": ";
    if (tab == std::string::npos || tab == 0) throw LoadError(where + "expected source<TAB>target");
    std::string key = fold_case(line.substr(0, tab));
    auto [it, fresh] = first_line.emplace(key, lineno);
    if (!fresh) {
      throw LoadError(where + "duplicate source '" + key + "' (first on line " +
                      std::to_string(it->second) + ")");
    }
    t.lexicon_.emplace(std::move(key), line.substr(tab + 1));
  }
  return t;
}

DictionaryTranslator DictionaryTranslator::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open lexicon " + path.string());
  return load(in, path.filename().string());
}

void DictionaryTranslator::save(std::ostream& out) const {
  for (const auto& [src, tgt] : lexicon_) out << src << '\t' << tgt << '\n';
}

std::string DictionaryTranslator::translate(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::size_t a = i, b = end;
    while (a < b && is_punct(text[a])) ++a;
    while (b > a && is_punct(text[b - 1])) --b;
    out.append(text.substr(i, a - i));
    const std::string_view core = text.substr(a, b - a);
    auto it = core.empty() ? lexicon_.end() : lexicon_.find(fold_case(core));
    if (it != lexicon_.end()) {
      out.append(it->second);
    } else {
      out.append(core);
    }
    out.append(text.substr(b, end - b));
    i = end;
  }
  return out;
}

std::vector<ParallelTriplet> build_triplets(const std::vector<LabeledExample>& corpus,
                                            const Translator& translator,
                                            const translit::MappingTable& table) {
  if (corpus.empty()) throw ContractError("build_triplets: empty corpus");
  std::vector<ParallelTriplet> out;
  out.reserve(corpus.size());
  for (const auto& ex : corpus) {
    std::string tr = translator.translate(ex.text);
    std::string tl = translit::transliterate(tr, table).output;
    out.push_back(ParallelTriplet{ex.id, ex.text, std::move(tr), std::move(tl), ex.label});
  }
  return out;
}

}  // namespace xlt::augment
