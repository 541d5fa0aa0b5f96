// SPDX-License-Identifier: Apache-2.0
#include "xlt/translit/table.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "xlt/error.hpp"
#include "xlt/utf8.hpp"

namespace xlt::translit {

namespace {

bool allowed_replacement_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '\'' || c == '~' || c == '.' ||
         c == '-';
}

std::string where(std::string_view table, const Rule& r) {
  std::string s(table);
  if (r.line > 0) s += ":" + std::to_string(r.line);
  return s;
}

}  // namespace

std::string_view to_string(SchwaPolicy policy) {
  switch (policy) {
    case SchwaPolicy::retain:
      return "retain";
    case SchwaPolicy::cluster:
      return "cluster";
    case SchwaPolicy::final:
      return "final";
  }
  return "retain";
}

SchwaPolicy parse_schwa_policy(std::string_view text) {
  if (text == "retain") return SchwaPolicy::retain;
  if (text == "cluster") return SchwaPolicy::cluster;
  if (text == "final") return SchwaPolicy::final;
  throw ContractError("unknown schwa policy '" + std::string(text) +
                      "' (expected retain, cluster or final)");
}

MappingTable MappingTable::from_rules(std::string name, std::vector<Rule> rules,
                                      SchwaPolicy policy) {
  std::map<std::u32string, const Rule*> seen;
  for (const Rule& r : rules) {
    if (r.source.empty()) throw LoadError(where(name, r) + ": empty rule source");
    for (char32_t cp : r.source) {
      if (is_ascii(cp)) {
        throw LoadError(where(name, r) + ": rule source contains ASCII; ASCII always passes through");
      }
    }
    for (char c : r.replacement) {
      if (!allowed_replacement_char(c)) {
        throw LoadError(where(name, r) + ": replacement '" + r.replacement +
                        "' has a character outside [a-zA-Z'~.-]");
      }
    }
    auto [it, fresh] = seen.emplace(r.source, &r);
    if (!fresh) {
      std::string msg = where(name, r) + ": duplicate source '" + encode_utf8(r.source) + "'";
      if (it->second->line > 0) msg += " (first on line " + std::to_string(it->second->line) + ")";
      throw LoadError(msg);
    }
  }

  MappingTable t;
  t.name_ = std::move(name);
  t.policy_ = policy;
  t.rules_ = std::move(rules);
  std::stable_sort(t.rules_.begin(), t.rules_.end(), [](const Rule& a, const Rule& b) {
    return a.source.size() > b.source.size();
  });
  t.index();
  return t;
}

void MappingTable::index() {
  by_first_.clear();
  traits_.assign(rules_.size(), Traits{});
  std::unordered_map<std::u32string, std::size_t> by_source;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    by_first_[rules_[i].source.front()].push_back(i);
    by_source.emplace(rules_[i].source, i);
    traits_[i].letter = std::any_of(rules_[i].replacement.begin(), rules_[i].replacement.end(),
                                    [](char c) { return (c | 0x20) >= 'a' && (c | 0x20) <= 'z'; });
  }
  // A dead form is S+c -> X paired with a live S -> Xa.
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    if (r.source.size() < 2 || r.replacement.empty()) continue;
    auto live = by_source.find(r.source.substr(0, r.source.size() - 1));
    if (live == by_source.end()) continue;
    if (rules_[live->second].replacement == r.replacement + "a") {
      traits_[i].dead = true;
      traits_[live->second].schwa = true;
    }
  }
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (!traits_[i].schwa) continue;
    const std::u32string& s = rules_[i].source;
    for (std::size_t len = 2; len < s.size(); ++len) {
      auto p = by_source.find(s.substr(0, len));
      if (p != by_source.end() && traits_[p->second].dead) {
        traits_[i].conjunct = true;
        break;
      }
    }
  }
}

MappingTable MappingTable::load(std::istream& in, std::string name) {
  std::vector<Rule> rules;
  SchwaPolicy policy = SchwaPolicy::retain;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kPragma = "#!schwa=";
      if (line.rfind(kPragma, 0) == 0) {
        try {
          policy = parse_schwa_policy(std::string_view(line).substr(kPragma.size()));
        } catch (const ContractError& e) {
          throw LoadError(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw LoadError(name + ":" + std::to_string(lineno) + ": expected source<TAB>replacement");
    }
    rules.push_back(Rule{decode_utf8(std::string_view(line).substr(0, tab)), line.substr(tab + 1),
                         lineno});
  }
  return from_rules(std::move(name), std::move(rules), policy);
}

MappingTable MappingTable::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open mapping table " + path.string());
  return load(in, path.filename().string());
}

std::optional<std::size_t> MappingTable::match(std::u32string_view text, std::size_t pos) const {
  if (pos >= text.size()) return std::nullopt;
  auto it = by_first_.find(text[pos]);
  if (it == by_first_.end()) return std::nullopt;
  for (std::size_t idx : it->second) {
    const std::u32string& s = rules_[idx].source;
    if (text.compare(pos, s.size(), s) == 0) return idx;
  }
  return std::nullopt;
}

TransliterationResult transliterate(std::string_view text, const MappingTable& table) {
  const std::u32string cps = decode_utf8(text);
  TransliterationResult res;
  res.rule_hits.assign(table.size(), 0);
  res.output.reserve(text.size());

  // Rules with empty replacements (joiners) are transparent here.
  auto word_ends_at = [&](std::size_t j) {
    while (j < cps.size() && !is_ascii(cps[j])) {
      auto next = table.match(cps, j);
      if (!next) return true;
      if (!table.rules()[*next].replacement.empty()) return !table.letter_bearing(*next);
      j += table.rules()[*next].source.size();
    }
    return true;
  };

  bool in_word = false;
  bool prev_dead = false;
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i];
    if (is_ascii(c)) {
      res.output.push_back(static_cast<char>(c));
      in_word = prev_dead = false;
      ++i;
      continue;
    }
    auto m = table.match(cps, i);
    if (!m) {
      append_utf8(res.output, c);
      ++res.unmapped_count;
      in_word = prev_dead = false;
      ++i;
      continue;
    }
    const std::size_t r = *m;
    ++res.rule_hits[r];
    const Rule& rule = table.rules()[r];
    const std::size_t next = i + rule.source.size();
    std::string_view repl = rule.replacement;

    if (table.schwa_bearing(r) && in_word && table.schwa_policy() != SchwaPolicy::retain &&
        word_ends_at(next)) {
      const bool keep = table.schwa_policy() == SchwaPolicy::cluster &&
                        (table.conjunct(r) || prev_dead);
      if (!keep) repl.remove_suffix(1);
    }
    res.output.append(repl);
    if (rule.replacement.empty()) {
      // transparent
    } else if (table.letter_bearing(r)) {
      in_word = true;
      prev_dead = table.dead_consonant(r);
    } else {
      in_word = prev_dead = false;
    }
    i = next;
  }
  return res;
}

}  // namespace xlt::translit
