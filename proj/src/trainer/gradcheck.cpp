// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "xlt/utf8.hpp"

#include "xlt/trainer/trainer.hpp"

namespace xlt::train {

num::GradCheckReport check_pipeline(std::uint64_t seed, int instances, double eps, double tol) {
  std::mt19937_64 rng(seed);
  const std::u32string alphabet = U"abcdeअकम";
  auto random_text = [&] {
    std::u32string s;
    const std::size_t len = 2 + rng() % 4;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    return encode_utf8(s);
  };

  TrainConfig cfg;
  cfg.mode = Mode::joint_ts;
  cfg.weights = {0.5, 1.0, 0.7, 1.3};
  cfg.encoder.num_layers = 2;
  cfg.encoder.hidden_dim = 8;
  cfg.encoder.num_heads = 2;
  cfg.encoder.ffn_dim = 16;
  cfg.encoder.max_positions = 8;

  std::vector<num::GradCheckReport> reports;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int inst = 0; inst < instances; ++inst) {
    std::vector<ParallelTriplet> batch;
    for (int i = 0; i < 2; ++i) {
      batch.push_back({"g" + std::to_string(i), random_text(), random_text(), random_text(),
                       static_cast<int>(rng() % 2)});
    }
    const auto tok = enc::TokenizerSpec::from_codepoints(alphabet, 8);
    const auto student = enc::EncoderParams::init(cfg.encoder, tok.vocab_size(), rng());
    num::Tensor teacher(num::Shape{batch.size(), cfg.encoder.hidden_dim});
    for (double& v : teacher.data()) v = normal(rng);

    auto fn = num::from_graph([&](num::Graph& g, std::span<const num::Var> vars) {
      return joint_objective(student, vars, batch, g.leaf(teacher, false), tok, cfg).total;
    });
    std::vector<num::Tensor> inputs;
    for (const auto& p : student.params()) inputs.push_back(p.value);
    reports.push_back(num::finite_diff_check(fn, std::move(inputs), eps, tol));
  }
  return num::merge(reports);
}

}  // namespace xlt::train
