// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "xlt/error.hpp"
#include "xlt/translit/cipher.hpp"
#include "xlt/translit/table.hpp"
#include "xlt/utf8.hpp"

using namespace xlt::translit;

namespace {

const std::string kData = XLT_DATA_DIR;

MappingTable hindi() { return MappingTable::load_file(kData + "/tables/devanagari_latin.tsv"); }
MappingTable malayalam() { return MappingTable::load_file(kData + "/tables/malayalam_latin.tsv"); }

MappingTable parse(const std::string& text) {
  std::istringstream in(text);
  return MappingTable::load(in, "inline");
}

std::string tl(const std::string& s, const MappingTable& t) { return transliterate(s, t).output; }

}  // namespace

TEST_CASE("utf8 round trip and replacement of malformed bytes") {
  const std::string s = "a\xE0\xA4\x95\xF0\x9F\x98\x80z";
  CHECK(xlt::decode_utf8(s) == U"aक\U0001F600z");
  CHECK(xlt::encode_utf8(xlt::decode_utf8(s)) == s);
  CHECK(xlt::decode_utf8("\xC0\xAF") == U"��");
  CHECK(xlt::decode_utf8("\xE0\xA4") == U"��");
}

TEST_CASE("ascii passes through untouched") {
  auto r = transliterate("help me, now!", hindi());
  CHECK(r.output == "help me, now!");
  CHECK(r.unmapped_count == 0);
}

TEST_CASE("empty table is identity and counts non-ascii") {
  MappingTable t;
  auto r = transliterate("xकy", t);
  CHECK(r.output == "xकy");
  CHECK(r.unmapped_count == 1);
}

TEST_CASE("longest match wins") {
  auto t = parse("क\tka\nक्\tk\nष\tsha\nक्ष\tksha\n");
  CHECK(tl("क्ष", t) == "ksha");
  CHECK(tl("क", t) == "ka");
  CHECK(tl("क्", t) == "k");
}

TEST_CASE("rule order breaks length ties") {
  auto t = MappingTable::from_rules("t", {{U"क", "ka", 0}, {U"ख", "kha", 0}});
  CHECK(t.rules()[0].source == U"क");
}

TEST_CASE("load errors name the line") {
  CHECK_THROWS_WITH_AS(parse("# c\nक\tka\nक\tkha\n"),
                       doctest::Contains("inline:3: duplicate source"), xlt::LoadError);
  CHECK_THROWS_WITH_AS(parse("क ka\n"), doctest::Contains("inline:1"), xlt::LoadError);
  CHECK_THROWS_WITH_AS(parse("क\tk1\n"), doctest::Contains("inline:1"), xlt::LoadError);
  CHECK_THROWS_AS(parse("k\tka\n"), xlt::LoadError);
  CHECK_THROWS_AS(parse("#!schwa=sometimes\n"), xlt::LoadError);
  CHECK_THROWS_AS(MappingTable::load_file("/nonexistent/table.tsv"), xlt::LoadError);
}

TEST_CASE("schwa traits are inferred from virama pairs") {
  auto t = hindi();
  const std::u32string ka = U"क", ka_dead = U"क्", ksha = U"क्ष";
  auto idx = [&](const std::u32string& s) { return *t.match(s, 0); };
  CHECK(t.schwa_bearing(idx(ka)));
  CHECK(t.dead_consonant(idx(ka_dead)));
  CHECK(t.conjunct(idx(ksha)));
  CHECK_FALSE(t.conjunct(idx(ka)));
  CHECK_FALSE(t.schwa_bearing(idx(U"का")));
}

TEST_CASE("hindi keywords") {
  auto t = hindi();
  CHECK(t.schwa_policy() == SchwaPolicy::cluster);
  CHECK(tl("मदद", t) == "madad");
  CHECK(tl("बारिश", t) == "baarish");
  CHECK(tl("सहय्त", t) == "sahayta");
  CHECK(tl("संदर्भ", t) == "sandarbha");
  CHECK(tl("नमस्ते", t) == "namaste");
  CHECK(tl("मदद चाहिए।", t) == "madad chaahie.");
}

TEST_CASE("schwa policies") {
  auto t = hindi();
  t.set_schwa_policy(SchwaPolicy::final);
  CHECK(tl("संदर्भ", t) == "sandarbh");
  CHECK(tl("मदद", t) == "madad");
  t.set_schwa_policy(SchwaPolicy::retain);
  CHECK(tl("संदर्भ", t) == "sandarbha");
  CHECK(tl("मदद", t) == "madada");
  // A single bare consonant keeps its vowel under every policy.
  for (auto p : {SchwaPolicy::retain, SchwaPolicy::cluster, SchwaPolicy::final}) {
    t.set_schwa_policy(p);
    CHECK(tl("न", t) == "na");
  }
  CHECK(parse_schwa_policy("final") == SchwaPolicy::final);
  CHECK_THROWS_AS(parse_schwa_policy("x"), xlt::ContractError);
}

TEST_CASE("malayalam keywords") {
  auto t = malayalam();
  CHECK(tl("പ്രളയം", t) == "pralayam");
  CHECK(tl("വെള്ളം", t) == "vellam");
  CHECK(tl("സഹായം", t) == "sahayam");
}

TEST_CASE("joiners are transparent") {
  auto t = malayalam();
  CHECK(tl("ന്‍", t) == "n");
  CHECK(tl("ന്‍മ", t) == "nma");
}

TEST_CASE("bundled corpora are fully mapped, deterministic and idempotent") {
  for (auto [table, corpus] : {std::pair{"devanagari_latin.tsv", "hindi_native.txt"},
                               std::pair{"malayalam_latin.tsv", "malayalam_native.txt"}}) {
    auto t = MappingTable::load_file(kData + "/tables/" + table);
    std::ifstream in(kData + "/corpora/" + corpus);
    std::string line;
    std::size_t lines = 0, hits = 0;
    while (std::getline(in, line)) {
      ++lines;
      auto a = transliterate(line, t);
      auto b = transliterate(line, t);
      REQUIRE(a.unmapped_count == 0);
      CHECK(a.output == b.output);
      CHECK(tl(a.output, t) == a.output);
      for (char c : a.output) CHECK(static_cast<unsigned char>(c) < 0x80);
      for (auto h : a.rule_hits) hits += h;
    }
    CHECK(lines == 1000);
    CHECK(hits > 0);
  }
}

TEST_CASE("cipher round trip") {
  std::u32string alphabet = U" .,";
  for (char32_t c = 0x10D0; c < 0x10D0 + 26; ++c) alphabet.push_back(c);
  auto key = CipherKey::random(alphabet, 7);
  CHECK(key.size() == alphabet.size());
  std::mt19937_64 rng(3);
  for (int n = 0; n < 2000; ++n) {
    std::u32string s;
    const auto len = rng() % 40;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
    const auto text = xlt::encode_utf8(s);
    const auto enc = cipher_transliterate(text, key);
    CHECK(xlt::decode_utf8(enc).size() == s.size());
    CHECK(cipher_inverse(enc, key) == text);
  }
}

TEST_CASE("cipher identity, rotation and errors") {
  auto id = CipherKey::identity(U"abc");
  CHECK(cipher_transliterate("cab", id) == "cab");
  auto rot = CipherKey::rotation(U"abc", 1);
  CHECK(cipher_transliterate("abc", rot) == "bca");
  CHECK(cipher_inverse("bca", rot) == "abc");
  CHECK_THROWS_AS(cipher_transliterate("abd", rot), xlt::ContractError);
  CHECK_THROWS_AS(CipherKey::between(U"ab", U"cc"), xlt::ContractError);
  CHECK_THROWS_AS(CipherKey::between(U"aa", U"cd"), xlt::ContractError);
  CHECK_THROWS_AS(CipherKey::between(U"ab", U"c"), xlt::ContractError);
}

TEST_CASE("cipher key exports as a mapping table") {
  auto key = CipherKey::between(U" აბ", U" xy");
  auto t = key.to_table("cipher");
  CHECK(t.size() == 2);
  CHECK(tl("ა ბა", t) == "x yx");
}
