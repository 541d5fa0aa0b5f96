// SPDX-License-Identifier: Apache-2.0
#include "xlt/encoder/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "xlt/error.hpp"
#include "xlt/num/ops.hpp"

namespace xlt::enc {

using num::Graph;
using num::Shape;
using num::Tensor;
using num::Var;

namespace {

constexpr std::size_t kGlobalHead = 2;  // tok_emb, pos_emb
constexpr std::size_t kTail = 4;        // ln_g, ln_b, head_w, head_b

const char* const kLayerNames[EncoderParams::kPerLayer] = {
    "ln1_g", "ln1_b", "w_qkv", "w_o",   "b_o",  "ln2_g",
    "ln2_b", "w_ff1", "b_ff1", "w_ff2", "b_ff2"};

Tensor normal(Shape shape, double stddev, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& x : t.data()) x = dist(rng);
  return t;
}

// Sinusoidal table; nearby positions get similar codes, which makes
// offset-based attention easy to learn from few examples.
Tensor sinusoid(std::size_t positions, std::size_t d) {
  Tensor t(Shape{positions, d});
  for (std::size_t p = 0; p < positions; ++p) {
    for (std::size_t i = 0; i < d; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(i - i % 2) / static_cast<double>(d));
      t.at(p, i) = i % 2 == 0 ? std::sin(static_cast<double>(p) * freq) : std::cos(static_cast<double>(p) * freq);
    }
  }
  return t;
}

}  // namespace

void EncoderConfig::validate() const {
  if (num_layers < 1) throw ContractError("num_layers must be positive");
  if (hidden_dim < 1 || num_heads < 1 || ffn_dim < 1 || max_positions < 1) {
    throw ContractError("encoder dimensions must be positive");
  }
  if (hidden_dim % num_heads != 0) {
    throw ContractError("hidden_dim " + std::to_string(hidden_dim) + " is not divisible by " +
                        std::to_string(num_heads) + " heads");
  }
  if (freeze_depth > num_layers) {
    throw ContractError("freeze_depth " + std::to_string(freeze_depth) + " exceeds " +
                        std::to_string(num_layers) + " layers");
  }
}

std::size_t default_freeze_depth(std::size_t num_layers) {
  return static_cast<std::size_t>(std::lround(0.75 * static_cast<double>(num_layers)));
}

EncoderParams EncoderParams::init(const EncoderConfig& config, std::size_t vocab_size,
                                  std::uint64_t seed) {
  config.validate();
  if (vocab_size <= static_cast<std::size_t>(TokenizerSpec::kFirstChar)) {
    throw ContractError("vocabulary holds no characters");
  }
  std::mt19937_64 rng(seed);
  const std::size_t d = config.hidden_dim, f = config.ffn_dim, L = config.num_layers;
  const double in_d = 1.0 / std::sqrt(static_cast<double>(d));
  const double in_f = 1.0 / std::sqrt(static_cast<double>(f));
  const double resid = 1.0 / std::sqrt(2.0 * static_cast<double>(L));

  std::vector<Parameter> p;
  p.push_back({"tok_emb", normal({vocab_size, d}, 0.5, rng), true});
  p.push_back({"pos_emb", sinusoid(config.max_positions, d), true});
  for (std::size_t l = 0; l < L; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    p.push_back({pre + "ln1_g", Tensor({d}, 1.0), true});
    p.push_back({pre + "ln1_b", Tensor({d}), true});
    p.push_back({pre + "w_qkv", normal({d, 3 * d}, in_d, rng), true});
    p.push_back({pre + "w_o", normal({d, d}, in_d * resid, rng), true});
    p.push_back({pre + "b_o", Tensor({d}), true});
    p.push_back({pre + "ln2_g", Tensor({d}, 1.0), true});
    p.push_back({pre + "ln2_b", Tensor({d}), true});
    p.push_back({pre + "w_ff1", normal({d, f}, in_d, rng), true});
    p.push_back({pre + "b_ff1", Tensor({f}), true});
    p.push_back({pre + "w_ff2", normal({f, d}, in_f * resid, rng), true});
    p.push_back({pre + "b_ff2", Tensor({d}), true});
  }
  p.push_back({"ln_g", Tensor({d}, 1.0), true});
  p.push_back({"ln_b", Tensor({d}), true});
  p.push_back({"head_w", normal({d, 2}, in_d, rng), true});
  p.push_back({"head_b", Tensor({2}), true});
  EncoderParams out = assemble(config, vocab_size, std::move(p));
  out.set_freeze_depth(config.freeze_depth);
  return out;
}

EncoderParams EncoderParams::assemble(EncoderConfig config, std::size_t vocab_size,
                                      std::vector<Parameter> params) {
  config.validate();
  const std::size_t d = config.hidden_dim, f = config.ffn_dim;
  std::vector<std::pair<std::string, Shape>> expected{{"tok_emb", {vocab_size, d}},
                                                      {"pos_emb", {config.max_positions, d}}};
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    const Shape shapes[kPerLayer] = {{d}, {d}, {d, 3 * d}, {d, d}, {d}, {d},
                                     {d}, {d, f},     {f},    {f, d}, {d}};
    for (std::size_t i = 0; i < kPerLayer; ++i) expected.emplace_back(pre + kLayerNames[i], shapes[i]);
  }
  expected.push_back({"ln_g", {d}});
  expected.push_back({"ln_b", {d}});
  expected.push_back({"head_w", {d, 2}});
  expected.push_back({"head_b", {2}});
  if (params.size() != expected.size()) {
    throw ShapeError("expected " + std::to_string(expected.size()) + " parameters, got " +
                     std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name != expected[i].first || params[i].value.shape() != expected[i].second) {
      throw ShapeError("parameter " + std::to_string(i) + ": expected " + expected[i].first + " " +
                       num::shape_str(expected[i].second) + ", got " + params[i].name + " " +
                       num::shape_str(params[i].value.shape()));
    }
  }
  EncoderParams out;
  out.config_ = config;
  out.vocab_size_ = vocab_size;
  out.params_ = std::move(params);
  return out;
}

const Parameter& EncoderParams::get(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p;
  }
  throw ContractError("no parameter named " + std::string(name));
}

Parameter& EncoderParams::get(std::string_view name) {
  return const_cast<Parameter&>(std::as_const(*this).get(name));
}

std::size_t EncoderParams::numel() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.numel();
  return n;
}

void EncoderParams::set_freeze_depth(std::size_t k) {
  if (k > config_.num_layers) {
    throw ContractError("freeze depth " + std::to_string(k) + " outside [0, " +
                        std::to_string(config_.num_layers) + "]");
  }
  config_.freeze_depth = k;
  const std::size_t frozen = k == 0 ? 0 : kGlobalHead + k * kPerLayer;
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i].trainable = i >= frozen;
}

void EncoderParams::freeze_all() {
  for (auto& p : params_) p.trainable = false;
}

EncoderParams make_teacher(const EncoderParams& student) {
  EncoderParams teacher = student;
  teacher.freeze_all();
  return teacher;
}

std::vector<Var> bind(Graph& graph, const EncoderParams& params, bool track_grads) {
  std::vector<Var> vars;
  vars.reserve(params.params().size());
  for (const auto& p : params.params()) {
    vars.push_back(graph.leaf_ref(p.value, track_grads && p.trainable));
  }
  return vars;
}

ForwardVars forward(const EncoderParams& params, std::span<const Var> bound,
                    const TokenBatch& batch) {
  const EncoderConfig& cfg = params.config();
  if (bound.size() != params.params().size()) throw ContractError("forward: unbound parameters");
  if (batch.batch == 0 || batch.seq_len == 0) throw ContractError("forward: empty batch");
  if (batch.seq_len > cfg.max_positions) {
    throw ShapeError("sequence length " + std::to_string(batch.seq_len) + " exceeds " +
                     std::to_string(cfg.max_positions) + " positions");
  }
  const std::size_t B = batch.batch, T = batch.seq_len, L = cfg.num_layers;
  std::vector<std::size_t> cls_rows(B);
  for (std::size_t b = 0; b < B; ++b) {
    if (batch.ids[b * T] != TokenizerSpec::kCls || batch.mask[b * T] == 0) {
      throw ContractError("sequence " + std::to_string(b) + " does not start with CLS");
    }
    cls_rows[b] = b * T;
  }
  std::vector<std::int32_t> positions(B * T);
  for (std::size_t i = 0; i < B * T; ++i) positions[i] = static_cast<std::int32_t>(i % T);

  Var x = num::add(num::embedding(bound[0], batch.ids), num::embedding(bound[1], positions));

  ForwardVars out;
  out.per_layer_cls.push_back(num::gather_rows(x, cls_rows));
  for (std::size_t l = 0; l < L; ++l) {
    const Var* w = bound.data() + kGlobalHead + l * EncoderParams::kPerLayer;
    const bool last = l + 1 == L;
    num::AttentionLayout layout{B, T, cfg.num_heads, batch.mask, last};

    Var a = num::layer_norm(x, w[0], w[1]);
    // No projection bias: a key bias cannot move the softmax and a value
    // bias folds into b_o.
    Var att = num::self_attention(num::matmul(a, w[2]), layout);
    // The final block only needs the CLS rows.
    Var resid = last ? num::gather_rows(x, cls_rows) : x;
    x = num::add(resid, num::linear(att, w[3], w[4]));
    Var m = num::layer_norm(x, w[5], w[6]);
    x = num::add(x, num::linear(num::gelu(num::linear(m, w[7], w[8])), w[9], w[10]));
    out.per_layer_cls.push_back(last ? x : num::gather_rows(x, cls_rows));
  }
  const Var* tail = bound.data() + kGlobalHead + L * EncoderParams::kPerLayer;
  out.h = num::layer_norm(out.per_layer_cls.back(), tail[0], tail[1]);
  out.logits = num::linear(out.h, tail[2], tail[3]);
  out.p_positive = num::column(num::softmax_rows(out.logits), 1);
  return out;
}

std::vector<EncoderOutput> encode(const EncoderParams& params, const TokenBatch& batch) {
  Graph g(false);
  auto vars = bind(g, params, false);
  ForwardVars f = forward(params, vars, batch);
  const std::size_t d = params.config().hidden_dim;
  std::vector<EncoderOutput> out(batch.batch);
  for (std::size_t b = 0; b < batch.batch; ++b) {
    auto row = [&](const Tensor& t, std::size_t width) {
      return std::vector<double>(t.ptr() + b * width, t.ptr() + (b + 1) * width);
    };
    out[b].h = row(f.h.value(), d);
    for (const Var& v : f.per_layer_cls) out[b].per_layer_cls.push_back(row(v.value(), d));
    out[b].logits = row(f.logits.value(), 2);
    out[b].p_positive = f.p_positive.value()[b];
  }
  return out;
}

EncoderOutput encode(const EncoderParams& params, std::span<const std::int32_t> ids,
                     std::span<const std::uint8_t> mask) {
  if (ids.empty()) throw ContractError("encode: empty id sequence");
  if (mask.size() != ids.size()) throw ShapeError("encode: mask length differs from ids");
  TokenBatch b{1, ids.size(), {ids.begin(), ids.end()}, {mask.begin(), mask.end()}};
  return encode(params, b).front();
}

namespace {

template <typename Fn>
void for_chunks(std::span<const std::string> texts, std::size_t batch_size, Fn fn) {
  if (batch_size == 0) throw ContractError("batch_size must be positive");
  for (std::size_t begin = 0; begin < texts.size(); begin += batch_size) {
    const std::size_t n = std::min(batch_size, texts.size() - begin);
    fn(begin, texts.subspan(begin, n));
  }
}

}  // namespace

std::vector<double> predict_positive(const EncoderParams& params, const TokenizerSpec& tokenizer,
                                     std::span<const std::string> texts, std::size_t batch_size) {
  std::vector<double> out(texts.size());
  for_chunks(texts, batch_size, [&](std::size_t begin, std::span<const std::string> chunk) {
    Graph g(false);
    auto vars = bind(g, params, false);
    ForwardVars f = forward(params, vars, tokenize_batch(chunk, tokenizer));
    for (std::size_t i = 0; i < chunk.size(); ++i) out[begin + i] = f.p_positive.value()[i];
  });
  return out;
}

Tensor encode_texts(const EncoderParams& params, const TokenizerSpec& tokenizer,
                    std::span<const std::string> texts, std::size_t batch_size) {
  if (texts.empty()) throw ContractError("encode_texts: no texts");
  const std::size_t d = params.config().hidden_dim;
  Tensor out(Shape{texts.size(), d});
  for_chunks(texts, batch_size, [&](std::size_t begin, std::span<const std::string> chunk) {
    Graph g(false);
    auto vars = bind(g, params, false);
    ForwardVars f = forward(params, vars, tokenize_batch(chunk, tokenizer));
    std::copy_n(f.h.value().ptr(), chunk.size() * d, out.ptr() + begin * d);
  });
  return out;
}

}  // namespace xlt::enc
