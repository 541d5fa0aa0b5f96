// SPDX-License-Identifier: Apache-2.0
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "xlt/augment/corpus.hpp"
#include "xlt/augment/synthetic.hpp"
#include "xlt/augment/translator.hpp"
#include "xlt/error.hpp"
#include "xlt/translit/table.hpp"

using namespace xlt::augment;

namespace {

DictionaryTranslator crisis_lexicon() {
  return DictionaryTranslator({{"help", "sahayta"}, {"flood", "toofan"}});
}

}  // namespace

TEST_CASE("dictionary translation") {
  CHECK(DictionaryTranslator().translate("help flood") == "help flood");
  auto t = crisis_lexicon();
  CHECK(t.translate("help flood") == "sahayta toofan");
  CHECK(t.translate("Help, flood!") == "sahayta, toofan!");
  CHECK(t.translate("  (HELP)\tnow ") == "  (sahayta)\tnow ");
  CHECK(t.translate("") == "");
  CHECK(t.translate("...") == "...");
}

TEST_CASE("lexicon loading") {
  std::istringstream ok("# lexicon\nhelp\tsahayta\nFlood\ttoofan\n");
  auto t = DictionaryTranslator::load(ok);
  CHECK(t.size() == 2);
  CHECK(t.translate("FLOOD") == "toofan");
  std::istringstream dup("help\ta\nHELP\tb\n");
  CHECK_THROWS_WITH_AS(DictionaryTranslator::load(dup), doctest::Contains("lexicon:2"),
                       xlt::LoadError);
  std::istringstream bad("help sahayta\n");
  CHECK_THROWS_AS(DictionaryTranslator::load(bad), xlt::LoadError);
  CHECK_THROWS_AS(DictionaryTranslator({{"a", "x"}, {"A", "y"}}), xlt::ContractError);
}

TEST_CASE("build_triplets") {
  std::vector<LabeledExample> one{{"1", "help please", 1}};
  xlt::translit::MappingTable empty;
  auto t = build_triplets(one, IdentityTranslator(), empty);
  REQUIRE(t.size() == 1);
  CHECK(t[0] == ParallelTriplet{"1", "help please", "help please", "help please", 1});
  CHECK_THROWS_AS(build_triplets({}, IdentityTranslator(), empty), xlt::ContractError);

  auto table = xlt::translit::MappingTable::from_rules(
      "t", {{U"स", "sa", 0}, {U"ह", "ha", 0}, {U"य", "ya", 0}, {U"त", "ta", 0}, {U"्", "", 0}});
  DictionaryTranslator hi(std::vector<std::pair<std::string, std::string>>{{"help", "सहयत"}});
  auto out = build_triplets({{"a", "Help!", 1}, {"b", "calm day", 0}}, hi, table);
  CHECK(out[0].tr == "सहयत!");
  CHECK(out[0].tl == "sahayata!");
  CHECK(out[1].tl == "calm day");
  CHECK(out[1].label == 0);
  CHECK(out[1].id == "b");
}

TEST_CASE("corpus JSONL") {
  std::istringstream in("{\"id\":\"1\",\"text\":\"good movie\",\"label\":1}\n\n");
  auto c = read_corpus(in);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == LabeledExample{"1", "good movie", 1});

  std::istringstream empty("");
  CHECK_THROWS_WITH_AS(read_corpus(empty), doctest::Contains("empty corpus"), xlt::LoadError);
  std::istringstream bad("{\"id\":\"1\",\"text\":\"x\",\"label\":1}\n{oops\n");
  CHECK_THROWS_WITH_AS(read_corpus(bad), doctest::Contains("corpus:2"), xlt::LoadError);
  std::istringstream label("{\"id\":\"1\",\"text\":\"x\",\"label\":2}\n");
  CHECK_THROWS_WITH_AS(read_corpus(label), doctest::Contains("unknown label"), xlt::LoadError);
  std::istringstream blank("{\"id\":\"1\",\"text\":\"  \",\"label\":0}\n");
  CHECK_THROWS_AS(read_corpus(blank), xlt::LoadError);
  std::istringstream missing("{\"id\":\"1\",\"label\":0}\n");
  CHECK_THROWS_WITH_AS(read_corpus(missing), doctest::Contains("'text'"), xlt::LoadError);
  CHECK_THROWS_AS(read_corpus(std::filesystem::path("/nonexistent/c.jsonl")), xlt::LoadError);
}

TEST_CASE("synthetic task shape and pipeline composition") {
  SyntheticConfig cfg;
  cfg.n_train = 100;
  cfg.n_val = 20;
  cfg.n_test = 30;
  auto task = make_synthetic_task(cfg);
  CHECK(task.train_triplets.size() == 100);
  CHECK(task.val_triplets.size() == 20);
  CHECK(task.test_triplets.size() == 30);
  for (std::size_t i = 0; i < task.train.size(); ++i) {
    const auto& t = task.train_triplets[i];
    CHECK(t.id == task.train[i].id);
    CHECK(t.label == task.train[i].label);
    CHECK(t.tr == task.translator.translate(t.src));
    CHECK(t.tl == xlt::translit::transliterate(t.tr, task.table).output);
    CHECK(xlt::translit::transliterate(t.tr, task.table).unmapped_count == 0);
    // Without label noise the label is exactly keyword presence.
    bool has_keyword = false;
    for (const auto& k : task.keywords) {
      std::istringstream words(t.src);
      for (std::string w; words >> w;) has_keyword = has_keyword || w == k;
    }
    CHECK(has_keyword == (t.label == 1));
  }
}

TEST_CASE("synthetic task is deterministic and the cipher inverts") {
  SyntheticConfig cfg;
  cfg.n_train = 50;
  cfg.n_val = 10;
  cfg.n_test = 10;
  auto a = make_synthetic_task(cfg);
  auto b = make_synthetic_task(cfg);
  CHECK(a.train_triplets == b.train_triplets);
  CHECK(a.test_triplets == b.test_triplets);
  for (const auto& t : a.test_triplets) {
    CHECK(xlt::translit::cipher_inverse(t.tl, a.cipher) == t.tr);
  }
  cfg.seed = 8;
  CHECK_FALSE(make_synthetic_task(cfg).train_triplets == a.train_triplets);
}

TEST_CASE("label noise leaves test labels clean") {
  SyntheticConfig cfg;
  cfg.n_train = 400;
  cfg.n_val = 10;
  cfg.n_test = 400;
  cfg.label_noise = 0.25;
  auto task = make_synthetic_task(cfg);
  auto flipped = [&](const std::vector<ParallelTriplet>& set) {
    std::size_t n = 0;
    for (const auto& t : set) {
      bool has_keyword = false;
      for (const auto& k : task.keywords) {
        std::istringstream words(t.src);
        for (std::string w; words >> w;) has_keyword = has_keyword || w == k;
      }
      n += has_keyword != (t.label == 1);
    }
    return n;
  };
  CHECK(flipped(task.test_triplets) == 0);
  CHECK(flipped(task.train_triplets) > 50);
  CHECK(flipped(task.train_triplets) < 150);
}

TEST_CASE("triplet JSONL round trip") {
  SyntheticConfig cfg;
  cfg.n_train = 500;
  cfg.n_val = 1;
  cfg.n_test = 1;
  auto task = make_synthetic_task(cfg);
  std::stringstream io;
  write_triplets(io, task.train_triplets);
  CHECK(read_triplets(io) == task.train_triplets);
  std::stringstream cio;
  write_corpus(cio, task.train);
  CHECK(read_corpus(cio) == task.train);
}
