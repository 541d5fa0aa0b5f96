// SPDX-License-Identifier: Apache-2.0
#include "xlt/encoder/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xlt/error.hpp"

namespace xlt::enc {

namespace {

using nlohmann::ordered_json;

constexpr const char* kFormat = "xlt-encoder/1";

}  // namespace

std::string checkpoint_to_json(const TokenizerSpec& tokenizer, const EncoderParams& params) {
  const EncoderConfig& c = params.config();
  ordered_json j;
  j["format"] = kFormat;
  j["config"] = {{"num_layers", c.num_layers},       {"hidden_dim", c.hidden_dim},
                 {"num_heads", c.num_heads},         {"ffn_dim", c.ffn_dim},
                 {"max_positions", c.max_positions}, {"freeze_depth", c.freeze_depth}};
  std::vector<std::uint32_t> cps;
  for (char32_t cp : tokenizer.codepoints()) cps.push_back(cp);
  j["tokenizer"] = {{"max_sequence_length", tokenizer.max_sequence_length}, {"codepoints", cps}};
  j["vocab_size"] = params.vocab_size();
  ordered_json arr = ordered_json::array();
  for (const auto& p : params.params()) {
    arr.push_back({{"name", p.name},
                   {"shape", p.value.shape()},
                   {"trainable", p.trainable},
                   {"data", std::vector<double>(p.value.data().begin(), p.value.data().end())}});
  }
  j["params"] = std::move(arr);
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const auto j = ordered_json::parse(text);
    if (j.at("format") != kFormat) throw LoadError("unsupported checkpoint format");
    const auto& jc = j.at("config");
    EncoderConfig c;
    c.num_layers = jc.at("num_layers");
    c.hidden_dim = jc.at("hidden_dim");
    c.num_heads = jc.at("num_heads");
    c.ffn_dim = jc.at("ffn_dim");
    c.max_positions = jc.at("max_positions");
    c.freeze_depth = jc.at("freeze_depth");

    std::u32string cps;
    for (std::uint32_t cp : j.at("tokenizer").at("codepoints")) cps.push_back(cp);
    TokenizerSpec tok =
        TokenizerSpec::from_codepoints(cps, j.at("tokenizer").at("max_sequence_length"));
    if (tok.vocabulary.size() != cps.size()) throw LoadError("checkpoint vocabulary has duplicates");

    std::vector<Parameter> params;
    for (const auto& jp : j.at("params")) {
      num::Shape shape = jp.at("shape").get<num::Shape>();
      std::vector<double> data = jp.at("data").get<std::vector<double>>();
      params.push_back({jp.at("name"), num::Tensor(std::move(shape), std::move(data)),
                        jp.at("trainable")});
    }
    const std::size_t vocab = j.at("vocab_size");
    if (vocab != tok.vocab_size()) throw LoadError("checkpoint vocab_size disagrees with tokenizer");
    return Checkpoint{std::move(tok), EncoderParams::assemble(c, vocab, std::move(params))};
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ShapeError& e) {
    throw LoadError(std::string("checkpoint shape mismatch: ") + e.what());
  } catch (const ContractError& e) {
    throw LoadError(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const TokenizerSpec& tokenizer,
                     const EncoderParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(tokenizer, params) << '\n';
  if (!out) throw LoadError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace xlt::enc
