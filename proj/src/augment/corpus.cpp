// SPDX-License-Identifier: Apache-2.0
#include "xlt/augment/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "xlt/error.hpp"

namespace xlt::augment {

namespace {

using nlohmann::ordered_json;

std::string at_line(const std::string& name, std::size_t line) {
  return name + ":" + std::to_string(line) + ": ";
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

int parse_label(const ordered_json& j, const std::string& where) {
  const auto it = j.find("label");
  if (it == j.end()) throw LoadError(where + "missing field 'label'");
  if (!it->is_number_integer() || (*it != 0 && *it != 1)) {
    throw LoadError(where + "unknown label value " + it->dump() + " (expected 0 or 1)");
  }
  return it->get<int>();
}

std::string parse_string(const ordered_json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw LoadError(where + "missing field '" + key + "'");
  if (!it->is_string()) throw LoadError(where + "field '" + key + "' is not a string");
  return it->get<std::string>();
}

template <typename Parse>
void for_each_record(std::istream& in, const std::string& name, Parse parse) {
  std::string line;
  std::size_t lineno = 0, records = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const std::string where = at_line(name, lineno);
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw LoadError(where + "malformed JSON");
    }
    if (!j.is_object()) throw LoadError(where + "expected a JSON object");
    parse(j, where);
    ++records;
  }
  if (records == 0) throw LoadError(name + ": empty corpus");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<LabeledExample> read_corpus(std::istream& in, const std::string& name) {
  std::vector<LabeledExample> out;
  for_each_record(in, name, [&](const ordered_json& j, const std::string& where) {
    LabeledExample ex{parse_string(j, "id", where), parse_string(j, "text", where),
                      parse_label(j, where)};
    if (blank(ex.text)) throw LoadError(where + "text is empty");
    out.push_back(std::move(ex));
  });
  return out;
}

std::vector<LabeledExample> read_corpus(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_corpus(in, path.string());
}

void write_corpus(std::ostream& out, const std::vector<LabeledExample>& corpus) {
  for (const auto& ex : corpus) {
    ordered_json j{{"id", ex.id}, {"text", ex.text}, {"label", ex.label}};
    out << j.dump() << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, const std::vector<LabeledExample>& corpus) {
  auto out = open_out(path);
  write_corpus(out, corpus);
}

std::vector<ParallelTriplet> read_triplets(std::istream& in, const std::string& name) {
  std::vector<ParallelTriplet> out;
  for_each_record(in, name, [&](const ordered_json& j, const std::string& where) {
    out.push_back(ParallelTriplet{parse_string(j, "id", where), parse_string(j, "src", where),
                                  parse_string(j, "tr", where), parse_string(j, "tl", where),
                                  parse_label(j, where)});
  });
  return out;
}

std::vector<ParallelTriplet> read_triplets(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_triplets(in, path.string());
}

void write_triplets(std::ostream& out, const std::vector<ParallelTriplet>& triplets) {
  for (const auto& t : triplets) {
    ordered_json j{{"id", t.id}, {"src", t.src}, {"tr", t.tr}, {"tl", t.tl}, {"label", t.label}};
    out << j.dump() << '\n';
  }
}

void write_triplets(const std::filesystem::path& path,
                    const std::vector<ParallelTriplet>& triplets) {
  auto out = open_out(path);
  write_triplets(out, triplets);
}

}  // namespace xlt::augment
