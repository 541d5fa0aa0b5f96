// SPDX-License-Identifier: Apache-2.0
#include "xlt/trainer/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "xlt/error.hpp"

namespace xlt::train {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::en:
      return "en";
    case Mode::tr:
      return "tr";
    case Mode::tl:
      return "tl";
    case Mode::en_tr_tl:
      return "en+tr+tl";
    case Mode::joint:
      return "joint";
    case Mode::joint_ts:
      return "joint_ts";
  }
  return "joint_ts";
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::src:
      return "src";
    case Variant::tr:
      return "tr";
    case Variant::tl:
      return "tl";
  }
  return "tl";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::en, Mode::tr, Mode::tl, Mode::en_tr_tl, Mode::joint, Mode::joint_ts}) {
    if (text == to_string(m)) return m;
  }
  throw ContractError("unknown mode '" + std::string(text) +
                      "' (expected en, tr, tl, en+tr+tl, joint or joint_ts)");
}

Variant parse_variant(std::string_view text) {
  if (text == "src" || text == "en") return Variant::src;
  if (text == "tr") return Variant::tr;
  if (text == "tl") return Variant::tl;
  throw ContractError("unknown variant '" + std::string(text) + "' (expected src, tr or tl)");
}

void TrainConfig::validate() const {
  weights.validate();
  encoder.validate();
  if (freeze_depth > encoder.num_layers) {
    throw ContractError("freeze_depth " + std::to_string(freeze_depth) + " exceeds num_layers " +
                        std::to_string(encoder.num_layers));
  }
  if (max_epochs < 1) throw ContractError("max_epochs must be positive");
  if (patience < 1) throw ContractError("patience must be at least 1");
  if (batch_size < 1) throw ContractError("batch_size must be positive");
  if (!(learning_rate > 0)) throw ContractError("learning_rate must be positive");
  if (max_sequence_length < 1 || max_sequence_length > encoder.max_positions) {
    throw ContractError("max_sequence_length must lie in [1, max_positions]");
  }
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1 && adam_eps > 0)) {
    throw ContractError("invalid Adam hyperparameters");
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ContractError("invalid number '" + v + "'");
  return out;
}

double parse_double(const std::string& v) {
  // from_chars for double is unavailable on some toolchains; strtod on a
  // full-match basis is equivalent here.
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw ContractError("invalid number '" + v + "'");
  return out;
}

using Setter = std::function<void(TrainConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mode", [](TrainConfig& c, const std::string& v) { c.mode = parse_mode(v); }},
      {"alpha", [](TrainConfig& c, const std::string& v) { c.weights.alpha = parse_double(v); }},
      {"beta1", [](TrainConfig& c, const std::string& v) { c.weights.beta1 = parse_double(v); }},
      {"beta2", [](TrainConfig& c, const std::string& v) { c.weights.beta2 = parse_double(v); }},
      {"beta3", [](TrainConfig& c, const std::string& v) { c.weights.beta3 = parse_double(v); }},
      {"freeze_depth",
       [](TrainConfig& c, const std::string& v) { c.freeze_depth = parse_number<std::size_t>(v); }},
      {"max_epochs",
       [](TrainConfig& c, const std::string& v) { c.max_epochs = parse_number<std::size_t>(v); }},
      {"patience",
       [](TrainConfig& c, const std::string& v) { c.patience = parse_number<std::size_t>(v); }},
      {"batch_size",
       [](TrainConfig& c, const std::string& v) { c.batch_size = parse_number<std::size_t>(v); }},
      {"learning_rate",
       [](TrainConfig& c, const std::string& v) { c.learning_rate = parse_double(v); }},
      {"seed", [](TrainConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(v); }},
      {"teacher_warmup_epochs",
       [](TrainConfig& c, const std::string& v) {
         c.teacher_warmup_epochs = parse_number<std::size_t>(v);
       }},
      {"val_variant", [](TrainConfig& c, const std::string& v) { c.val_variant = parse_variant(v); }},
      {"num_layers",
       [](TrainConfig& c, const std::string& v) { c.encoder.num_layers = parse_number<std::size_t>(v); }},
      {"hidden_dim",
       [](TrainConfig& c, const std::string& v) { c.encoder.hidden_dim = parse_number<std::size_t>(v); }},
      {"num_heads",
       [](TrainConfig& c, const std::string& v) { c.encoder.num_heads = parse_number<std::size_t>(v); }},
      {"ffn_dim",
       [](TrainConfig& c, const std::string& v) { c.encoder.ffn_dim = parse_number<std::size_t>(v); }},
      {"max_positions",
       [](TrainConfig& c, const std::string& v) {
         c.encoder.max_positions = parse_number<std::size_t>(v);
       }},
      {"max_sequence_length",
       [](TrainConfig& c, const std::string& v) {
         c.max_sequence_length = parse_number<std::size_t>(v);
       }},
      {"adam_beta1", [](TrainConfig& c, const std::string& v) { c.adam_beta1 = parse_double(v); }},
      {"adam_beta2", [](TrainConfig& c, const std::string& v) { c.adam_beta2 = parse_double(v); }},
      {"adam_eps", [](TrainConfig& c, const std::string& v) { c.adam_eps = parse_double(v); }},
  };
  return table;
}

}  // namespace

TrainConfig parse_config(std::istream& in, const std::string& name) {
  TrainConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = name + ":" + std::to_string(lineno) + ": ";
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw LoadError(where + "expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw LoadError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw LoadError(where + "repeated key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const ContractError& e) {
      throw LoadError(where + key + ": " + e.what());
    }
  }
  cfg.encoder.freeze_depth = cfg.freeze_depth;
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw LoadError(name + ": " + e.what());
  }
  return cfg;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config " + path.string());
  return parse_config(in, path.string());
}

std::string format_config(const TrainConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "mode = " << to_string(c.mode) << '\n'
    << "alpha = " << c.weights.alpha << '\n'
    << "beta1 = " << c.weights.beta1 << '\n'
    << "beta2 = " << c.weights.beta2 << '\n'
    << "beta3 = " << c.weights.beta3 << '\n'
    << "freeze_depth = " << c.freeze_depth << '\n'
    << "max_epochs = " << c.max_epochs << '\n'
    << "patience = " << c.patience << '\n'
    << "batch_size = " << c.batch_size << '\n'
    << "learning_rate = " << c.learning_rate << '\n'
    << "seed = " << c.seed << '\n'
    << "teacher_warmup_epochs = " << c.teacher_warmup_epochs << '\n'
    << "val_variant = " << to_string(c.val_variant) << '\n'
    << "num_layers = " << c.encoder.num_layers << '\n'
    << "hidden_dim = " << c.encoder.hidden_dim << '\n'
    << "num_heads = " << c.encoder.num_heads << '\n'
    << "ffn_dim = " << c.encoder.ffn_dim << '\n'
    << "max_positions = " << c.encoder.max_positions << '\n'
    << "max_sequence_length = " << c.max_sequence_length << '\n'
    << "adam_beta1 = " << c.adam_beta1 << '\n'
    << "adam_beta2 = " << c.adam_beta2 << '\n'
    << "adam_eps = " << c.adam_eps << '\n';
  return o.str();
}

}  // namespace xlt::train
