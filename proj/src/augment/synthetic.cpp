// SPDX-License-Identifier: Apache-2.0
#include "xlt/augment/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "xlt/error.hpp"
#include "xlt/utf8.hpp"

namespace xlt::augment {

namespace {

const std::vector<std::string> kKeywords{
    "help",    "flood",   "rescue",   "trapped", "urgent", "shelter", "injured", "stranded",
    "storm",   "evacuate", "missing", "food",    "boats",  "medical", "collapse", "drowning"};

const std::vector<std::string> kNeutral{
    "the",     "a",      "we",     "are",     "is",      "in",      "at",      "near",
    "today",   "tonight", "city",  "road",    "house",   "family",  "people",  "now",
    "very",    "please", "our",    "my",      "school",  "market",  "street",  "river",
    "bridge",  "village", "morning", "evening", "still", "all",     "some",    "many",
    "news",    "photo",  "great",  "nice",    "game",    "match",   "movie",   "song",
    "friends", "lunch",  "traffic", "weather", "sunny",  "happy",   "going",   "watch"};

// One decoy per keyword; English forms are unrelated to the keyword.
const std::vector<std::string> kDecoys{
    "garden", "music", "ticket", "coffee", "window", "letter", "cinema",  "holiday",
    "jacket", "camera", "pencil", "guitar", "office", "yellow", "picture", "dinner"};

// Georgian Mkhedruli letters used as the target script.
constexpr char32_t kScriptBase = 0x10D0;
constexpr std::size_t kScriptLetters = 26;
const std::u32string kVowelIdx = {0, 4, 8, 14, 20};  // positions treated as vowels

std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

char32_t letter(std::size_t i) { return kScriptBase + static_cast<char32_t>(i); }

bool is_vowel(std::size_t i) {
  return std::find(kVowelIdx.begin(), kVowelIdx.end(), static_cast<char32_t>(i)) != kVowelIdx.end();
}

std::u32string target_word(std::mt19937_64& rng) {
  std::vector<std::size_t> cons, vows;
  for (std::size_t i = 0; i < kScriptLetters; ++i) (is_vowel(i) ? vows : cons).push_back(i);
  std::u32string w;
  const std::size_t syllables = 2 + draw(rng, 2);
  for (std::size_t s = 0; s < syllables; ++s) {
    w.push_back(letter(cons[draw(rng, cons.size())]));
    w.push_back(letter(vows[draw(rng, vows.size())]));
    if (draw(rng, 3) == 0) w.push_back(letter(cons[draw(rng, cons.size())]));
  }
  return w;
}

std::vector<LabeledExample> sentences(std::mt19937_64& rng, const SyntheticConfig& cfg,
                                      const std::vector<std::string>& keywords,
                                      const std::vector<std::string>& neutral, std::size_t n,
                                      const std::string& prefix, bool noisy) {
  std::vector<LabeledExample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = cfg.min_words + draw(rng, cfg.max_words - cfg.min_words + 1);
    std::vector<std::string> words;
    for (std::size_t k = 0; k < len; ++k) words.push_back(neutral[draw(rng, neutral.size())]);
    int label = uniform(rng) < cfg.positive_rate ? 1 : 0;
    if (label == 1) {
      const std::size_t hits = 1 + draw(rng, 2);
      for (std::size_t h = 0; h < hits; ++h) {
        words[draw(rng, words.size())] = keywords[draw(rng, keywords.size())];
      }
    }
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    if (noisy && uniform(rng) < cfg.label_noise) label = 1 - label;
    out.push_back({prefix + std::to_string(i), std::move(text), label});
  }
  return out;
}

}  // namespace

SyntheticTask make_synthetic_task(const SyntheticConfig& cfg) {
  if (cfg.min_words < 1 || cfg.max_words < cfg.min_words) {
    throw ContractError("synthetic sentence length range is empty");
  }
  if (cfg.n_train == 0 || cfg.n_val == 0 || cfg.n_test == 0) {
    throw ContractError("synthetic splits must be non-empty");
  }
  if (cfg.n_keywords < 1 || cfg.n_keywords > kKeywords.size() || cfg.n_neutral < 1 ||
      cfg.n_neutral > kNeutral.size()) {
    throw ContractError("synthetic vocabulary sizes out of range");
  }
  const std::vector<std::string> keywords(kKeywords.begin(), kKeywords.begin() + static_cast<long>(cfg.n_keywords));
  const std::vector<std::string> base_neutral(kNeutral.begin(), kNeutral.begin() + static_cast<long>(cfg.n_neutral));
  std::mt19937_64 rng(cfg.seed);

  // Lexicon: every English word gets a distinct target-script word.
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::u32string> used;
  auto fresh = [&] {
    for (;;) {
      auto w = target_word(rng);
      if (used.insert(w).second) return w;
    }
  };
  std::vector<std::u32string> keyword_forms;
  for (const auto& k : keywords) {
    keyword_forms.push_back(fresh());
    entries.emplace_back(k, encode_utf8(keyword_forms.back()));
  }
  for (const auto& w : base_neutral) entries.emplace_back(w, encode_utf8(fresh()));
  std::vector<std::string> neutral = base_neutral;
  if (cfg.decoys) {
    for (std::size_t i = 0; i < keywords.size(); ++i) {
      std::u32string w = keyword_forms[i];
      for (;;) {
        std::u32string cand = w;
        const std::size_t pos = draw(rng, cand.size());
        const std::size_t was = cand[pos] - kScriptBase;
        std::size_t repl = draw(rng, kScriptLetters);
        if (is_vowel(repl) != is_vowel(was)) continue;
        cand[pos] = letter(repl);
        if (used.insert(cand).second) {
          entries.emplace_back(kDecoys[i], encode_utf8(cand));
          break;
        }
      }
      neutral.push_back(kDecoys[i]);
    }
  }

  // Cipher: random bijection from the script letters to a-z.
  std::u32string from, to;
  for (std::size_t i = 0; i < kScriptLetters; ++i) {
    from.push_back(letter(i));
    to.push_back(U'a' + static_cast<char32_t>(i));
  }
  std::u32string shuffled = to;
  for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[draw(rng, i)]);
  from.push_back(U' ');
  shuffled.push_back(U' ');
  auto key = translit::CipherKey::between(from, shuffled);

  SyntheticTask task{DictionaryTranslator(entries), key, key.to_table("synthetic_cipher"), keywords,
                     {}, {}, {}, {}, {}, {}};
  task.train = sentences(rng, cfg, keywords, neutral, cfg.n_train, "train-", true);
  task.val = sentences(rng, cfg, keywords, neutral, cfg.n_val, "val-", true);
  task.test = sentences(rng, cfg, keywords, neutral, cfg.n_test, "test-", false);
  task.train_triplets = build_triplets(task.train, task.translator, task.table);
  task.val_triplets = build_triplets(task.val, task.translator, task.table);
  task.test_triplets = build_triplets(task.test, task.translator, task.table);
  return task;
}

void write_synthetic_task(const SyntheticTask& task, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_triplets(dir / "train.jsonl", task.train_triplets);
  write_triplets(dir / "val.jsonl", task.val_triplets);
  write_triplets(dir / "test.jsonl", task.test_triplets);
  write_corpus(dir / "train_corpus.jsonl", task.train);
  write_corpus(dir / "val_corpus.jsonl", task.val);
  write_corpus(dir / "test_corpus.jsonl", task.test);
  {
    std::ofstream out(dir / "lexicon.tsv", std::ios::binary);
    if (!out) throw LoadError("cannot write " + (dir / "lexicon.tsv").string());
    task.translator.save(out);
  }
  std::ofstream out(dir / "cipher_table.tsv", std::ios::binary);
  if (!out) throw LoadError("cannot write " + (dir / "cipher_table.tsv").string());
  out << "# synthetic target script -> Latin\n";
  for (const auto& r : task.table.rules()) out << encode_utf8(r.source) << '\t' << r.replacement << '\n';
}

}  // namespace xlt::augment
