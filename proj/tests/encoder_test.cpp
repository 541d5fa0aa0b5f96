// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "xlt/encoder/checkpoint.hpp"
#include "xlt/encoder/encoder.hpp"
#include "xlt/encoder/tokenizer.hpp"
#include "xlt/error.hpp"
#include "xlt/num/adam.hpp"
#include "xlt/num/gradcheck.hpp"
#include "xlt/num/losses.hpp"
#include "xlt/num/ops.hpp"

using namespace xlt::enc;
using xlt::num::Tensor;

namespace {

const std::vector<std::string> kTexts{"help needed now", "flood water rising", "all quiet here",
                                      "send boats please"};

TokenizerSpec tok() { return TokenizerSpec::build(kTexts, 32); }

EncoderConfig small(std::size_t layers = 2, std::size_t d = 16) {
  EncoderConfig c;
  c.num_layers = layers;
  c.hidden_dim = d;
  c.num_heads = 2;
  c.ffn_dim = 2 * d;
  c.max_positions = 32;
  return c;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::string random_word(std::mt19937_64& rng) {
  const std::string letters = "abcdefghijklmnopqrstuvwxyz ";
  std::string s;
  const auto n = 4 + rng() % 10;
  for (std::size_t i = 0; i < n; ++i) s.push_back(letters[rng() % 26]);
  return s;
}

}  // namespace

TEST_CASE("tokenize") {
  auto t = TokenizerSpec::from_codepoints(U"ab", 8);
  CHECK(tokenize("", t) == std::vector<std::int32_t>{TokenizerSpec::kCls});
  CHECK(tokenize("ab", t) == std::vector<std::int32_t>{1, 3, 4});
  CHECK(tokenize("a☃", t) == std::vector<std::int32_t>{1, 3, TokenizerSpec::kUnk});
  CHECK(tokenize("abababababab", t).size() == 8);
  CHECK(t.vocab_size() == 5);
  CHECK(t.codepoints() == U"ab");
}

TEST_CASE("make_batch pads and masks") {
  std::vector<std::vector<std::int32_t>> seqs{{1, 3, 4}, {1}};
  auto b = make_batch(seqs);
  CHECK(b.seq_len == 3);
  CHECK(b.ids == std::vector<std::int32_t>{1, 3, 4, 1, 0, 0});
  CHECK(b.mask == std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0});
  CHECK_THROWS_AS(make_batch(std::vector<std::vector<std::int32_t>>{}), xlt::ContractError);
}

TEST_CASE("config validation") {
  auto c = small();
  c.num_heads = 3;
  CHECK_THROWS_AS(c.validate(), xlt::ContractError);
  c = small();
  c.freeze_depth = 3;
  CHECK_THROWS_AS(c.validate(), xlt::ContractError);
  CHECK(default_freeze_depth(4) == 3);
  CHECK(default_freeze_depth(12) == 9);
}

TEST_CASE("encode shapes and probabilities") {
  auto t = tok();
  auto p = EncoderParams::init(small(3), t.vocab_size(), 1);
  auto batch = tokenize_batch(kTexts, t);
  auto out = encode(p, batch);
  REQUIRE(out.size() == kTexts.size());
  for (const auto& o : out) {
    CHECK(o.h.size() == 16);
    CHECK(o.per_layer_cls.size() == 4);
    CHECK(o.logits.size() == 2);
    const double m = std::max(o.logits[0], o.logits[1]);
    const double e0 = std::exp(o.logits[0] - m), e1 = std::exp(o.logits[1] - m);
    CHECK(std::abs(e1 / (e0 + e1) - o.p_positive) < 1e-12);
    CHECK(o.p_positive > 0.0);
    CHECK(o.p_positive < 1.0);
  }
}

TEST_CASE("encode rejects malformed input") {
  auto t = tok();
  auto p = EncoderParams::init(small(), t.vocab_size(), 1);
  std::vector<std::int32_t> no_cls{3, 4};
  std::vector<std::uint8_t> mask{1, 1};
  CHECK_THROWS_AS(encode(p, no_cls, mask), xlt::ContractError);
  std::vector<std::int32_t> long_ids(33, 3);
  long_ids[0] = TokenizerSpec::kCls;
  std::vector<std::uint8_t> long_mask(33, 1);
  CHECK_THROWS_AS(encode(p, long_ids, long_mask), xlt::ShapeError);
}

TEST_CASE("padding never changes h") {
  auto t = tok();
  auto p = EncoderParams::init(small(), t.vocab_size(), 2);
  for (const auto& s : kTexts) {
    auto ids = tokenize(s, t);
    std::vector<std::uint8_t> mask(ids.size(), 1);
    auto base = encode(p, ids, mask);
    for (int extra = 1; extra <= 5; ++extra) {
      ids.push_back(TokenizerSpec::kPad);
      mask.push_back(0);
      auto padded = encode(p, ids, mask);
      CHECK(max_abs_diff(base.h, padded.h) <= 1e-12);
    }
  }
}

TEST_CASE("swapping two tokens changes h") {
  std::mt19937_64 rng(5);
  auto t = TokenizerSpec::from_codepoints(U"abcdefghijklmnopqrstuvwxyz ", 32);
  auto p = EncoderParams::init(small(), t.vocab_size(), 3);
  int checked = 0;
  while (checked < 20) {
    auto ids = tokenize(random_word(rng), t);
    const std::size_t i = 1 + rng() % (ids.size() - 1), j = 1 + rng() % (ids.size() - 1);
    if (ids[i] == ids[j]) continue;
    auto swapped = ids;
    std::swap(swapped[i], swapped[j]);
    std::vector<std::uint8_t> mask(ids.size(), 1);
    CHECK(max_abs_diff(encode(p, ids, mask).h, encode(p, swapped, mask).h) > 1e-9);
    ++checked;
  }
}

TEST_CASE("freeze depth boundaries") {
  auto p = EncoderParams::init(small(3), tok().vocab_size(), 1);
  for (const auto& q : p.params()) CHECK(q.trainable);
  p.set_freeze_depth(3);
  for (const auto& q : p.params()) {
    const bool head = q.name == "ln_g" || q.name == "ln_b" || q.name == "head_w" || q.name == "head_b";
    CHECK(q.trainable == head);
  }
  p.set_freeze_depth(1);
  CHECK_FALSE(p.get("tok_emb").trainable);
  CHECK_FALSE(p.get("pos_emb").trainable);
  CHECK_FALSE(p.get("layer0.w_qkv").trainable);
  CHECK(p.get("layer1.ln1_g").trainable);
  CHECK(p.get("layer2.b_ff2").trainable);
  CHECK(p.config().freeze_depth == 1);
  CHECK_THROWS_AS(p.set_freeze_depth(4), xlt::ContractError);
}

TEST_CASE("teacher is a frozen deep copy") {
  auto t = tok();
  auto student = EncoderParams::init(small(), t.vocab_size(), 4);
  auto teacher = make_teacher(student);
  for (std::size_t i = 0; i < student.params().size(); ++i) {
    CHECK(teacher.params()[i].value == student.params()[i].value);
    CHECK_FALSE(teacher.params()[i].trainable);
  }
  auto batch = tokenize_batch(kTexts, t);
  const auto before = encode(teacher, batch);
  const auto snapshot = teacher.params();

  // 100 Adam steps on the student with a classification loss.
  std::vector<double> labels{1, 0, 0, 1};
  xlt::num::AdamState adam;
  adam.lr = 1e-2;
  for (int step = 0; step < 100; ++step) {
    xlt::num::Graph g;
    auto vars = bind(g, student);
    auto f = forward(student, vars, batch);
    g.backward(xlt::num::bce_loss(f.p_positive, labels));
    std::vector<Tensor*> ptrs;
    std::vector<Tensor> grads;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      ptrs.push_back(&student.params()[i].value);
      grads.push_back(g.grad(vars[i]));
    }
    xlt::num::adam_step(ptrs, grads, adam);
  }
  CHECK_FALSE(student.params()[0].value == snapshot[0].value);
  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    CHECK(teacher.params()[i].value == snapshot[i].value);
  }
  const auto after = encode(teacher, batch);
  for (std::size_t b = 0; b < before.size(); ++b) CHECK(before[b].h == after[b].h);
}

TEST_CASE("frozen parameters receive no gradient") {
  auto t = tok();
  auto p = EncoderParams::init(small(), t.vocab_size(), 4);
  p.set_freeze_depth(1);
  xlt::num::Graph g;
  auto vars = bind(g, p);
  auto f = forward(p, vars, tokenize_batch(kTexts, t));
  g.backward(xlt::num::bce_loss(f.p_positive, std::vector<double>{1, 0, 1, 0}));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    CHECK(g.requires_grad(vars[i].id()) == p.params()[i].trainable);
  }
}

TEST_CASE("checkpoint round trip") {
  auto t = tok();
  auto p = EncoderParams::init(small(), t.vocab_size(), 9);
  p.set_freeze_depth(1);
  const auto path = std::filesystem::temp_directory_path() / "xlt_encoder_test_ckpt.json";
  save_checkpoint(path, t, p);
  auto ck = load_checkpoint(path);
  std::filesystem::remove(path);
  CHECK(ck.tokenizer.vocabulary == t.vocabulary);
  CHECK(ck.tokenizer.max_sequence_length == t.max_sequence_length);
  CHECK(ck.params.config().freeze_depth == 1);
  for (std::size_t i = 0; i < p.params().size(); ++i) {
    CHECK(ck.params.params()[i].value == p.params()[i].value);
    CHECK(ck.params.params()[i].trainable == p.params()[i].trainable);
  }
  auto batch = tokenize_batch(kTexts, t);
  auto a = encode(p, batch), b = encode(ck.params, batch);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs_diff(a[i].h, b[i].h) <= 1e-12);
}

TEST_CASE("checkpoint load errors") {
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"), xlt::LoadError);
  CHECK_THROWS_AS(checkpoint_from_json("{"), xlt::LoadError);
  auto t = tok();
  auto text = checkpoint_to_json(t, EncoderParams::init(small(), t.vocab_size(), 1));
  const auto pos = text.find("\"hidden_dim\":16");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 15, "\"hidden_dim\":18");
  CHECK_THROWS_AS(checkpoint_from_json(text), xlt::LoadError);
}

TEST_CASE("encoder gradient matches finite differences") {
  auto t = tok();
  EncoderConfig c = small(2, 8);
  auto p = EncoderParams::init(c, t.vocab_size(), 11);
  auto batch = tokenize_batch(kTexts, t);
  const std::vector<double> labels{1, 0, 1, 0};
  auto fn = xlt::num::from_graph([&](xlt::num::Graph&, std::span<const xlt::num::Var> vars) {
    auto f = forward(p, vars, batch);
    return xlt::num::bce_loss(f.p_positive, labels);
  });
  std::vector<Tensor> inputs;
  for (const auto& q : p.params()) inputs.push_back(q.value);
  auto report = xlt::num::finite_diff_check(fn, inputs, 1e-5, 1e-4);
  INFO(report.summary());
  CHECK(report.passed);
}
