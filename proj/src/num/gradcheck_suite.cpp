// SPDX-License-Identifier: Apache-2.0
#include "xlt/num/gradcheck_suite.hpp"

#include <random>

#include "xlt/num/losses.hpp"
#include "xlt/num/ops.hpp"

namespace xlt::num {
namespace {

Tensor random_tensor(std::mt19937_64& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = dist(rng);
  return t;
}

// Away from the kink at zero so central differences never straddle it.
Tensor random_nonzero(std::mt19937_64& rng, Shape shape) {
  Tensor t = random_tensor(rng, std::move(shape), 0.1, 1.0);
  std::bernoulli_distribution flip(0.5);
  for (double& v : t.data()) {
    if (flip(rng)) v = -v;
  }
  return t;
}

// sum(y * w) for a fixed random w of y's shape.
Var contract(Var y, const Tensor& w) {
  Graph& g = y.graph();
  return sum(mul(y, g.leaf(w)));
}

struct Case {
  std::string name;
  std::vector<Tensor> inputs;
  GraphFn fn;
};

std::vector<Case> make_cases(std::mt19937_64& rng) {
  std::vector<Case> cases;
  auto weights = [&rng](Shape s) { return random_tensor(rng, std::move(s)); };

  {
    Tensor w = weights({3, 4});
    cases.push_back({"add", {random_tensor(rng, {3, 4}), random_tensor(rng, {3, 4})},
                     [w](Graph&, std::span<const Var> x) { return contract(add(x[0], x[1]), w); }});
  }
  {
    Tensor w = weights({3, 4});
    cases.push_back({"sub", {random_tensor(rng, {3, 4}), random_tensor(rng, {3, 4})},
                     [w](Graph&, std::span<const Var> x) { return contract(sub(x[0], x[1]), w); }});
  }
  {
    Tensor w = weights({3, 4});
    cases.push_back({"mul", {random_tensor(rng, {3, 4}), random_tensor(rng, {3, 4})},
                     [w](Graph&, std::span<const Var> x) { return contract(mul(x[0], x[1]), w); }});
  }
  {
    Tensor w = weights({5});
    cases.push_back({"scale", {random_tensor(rng, {5})},
                     [w](Graph&, std::span<const Var> x) { return contract(scale(x[0], -1.7), w); }});
  }
  {
    Tensor w = weights({3, 4});
    cases.push_back({"add_row", {random_tensor(rng, {3, 4}), random_tensor(rng, {4})},
                     [w](Graph&, std::span<const Var> x) { return contract(add_row(x[0], x[1]), w); }});
  }
  {
    Tensor w = weights({3, 2});
    cases.push_back({"matmul", {random_tensor(rng, {3, 4}), random_tensor(rng, {4, 2})},
                     [w](Graph&, std::span<const Var> x) { return contract(matmul(x[0], x[1]), w); }});
  }
  {
    Tensor w = weights({3, 2});
    cases.push_back({"linear",
                     {random_tensor(rng, {3, 4}), random_tensor(rng, {4, 2}), random_tensor(rng, {2})},
                     [w](Graph&, std::span<const Var> x) { return contract(linear(x[0], x[1], x[2]), w); }});
  }
  cases.push_back({"sum", {random_tensor(rng, {2, 3})},
                   [](Graph&, std::span<const Var> x) { return scale(sum(x[0]), 0.7); }});
  cases.push_back({"mean", {random_tensor(rng, {2, 3})},
                   [](Graph&, std::span<const Var> x) { return scale(mean(x[0]), 3.0); }});
  {
    Tensor w = weights({3, 4});
    cases.push_back({"relu", {random_nonzero(rng, {3, 4})},
                     [w](Graph&, std::span<const Var> x) { return contract(relu(x[0]), w); }});
  }
  {
    Tensor w = weights({3, 4});
    cases.push_back({"gelu", {random_tensor(rng, {3, 4}, -3.0, 3.0)},
                     [w](Graph&, std::span<const Var> x) { return contract(gelu(x[0]), w); }});
  }
  {
    Tensor w = weights({3, 4});
    cases.push_back({"tanh", {random_tensor(rng, {3, 4}, -2.0, 2.0)},
                     [w](Graph&, std::span<const Var> x) { return contract(tanh(x[0]), w); }});
  }
  {
    Tensor w = weights({3, 4});
    cases.push_back({"exp", {random_tensor(rng, {3, 4})},
                     [w](Graph&, std::span<const Var> x) { return contract(exp(x[0]), w); }});
  }
  {
    Tensor w = weights({3, 4});
    cases.push_back({"log", {random_tensor(rng, {3, 4}, 0.2, 3.0)},
                     [w](Graph&, std::span<const Var> x) { return contract(log(x[0]), w); }});
  }
  {
    Tensor w = weights({3, 5});
    cases.push_back({"softmax_rows", {random_tensor(rng, {3, 5}, -2.0, 2.0)},
                     [w](Graph&, std::span<const Var> x) { return contract(softmax_rows(x[0]), w); }});
  }
  {
    Tensor w = weights({3, 6});
    Tensor gain = random_tensor(rng, {6}, 0.5, 1.5);
    cases.push_back({"layer_norm", {random_tensor(rng, {3, 6}, -2.0, 2.0), gain, random_tensor(rng, {6})},
                     [w](Graph&, std::span<const Var> x) { return contract(layer_norm(x[0], x[1], x[2]), w); }});
  }
  {
    Tensor w = weights({5, 3});
    cases.push_back({"embedding", {random_tensor(rng, {4, 3})}, [w](Graph&, std::span<const Var> x) {
                       static const std::int32_t ids[] = {2, 0, 2, 3, 1};
                       return contract(embedding(x[0], ids), w);
                     }});
  }
  {
    Tensor w = weights({3, 4});
    cases.push_back({"gather_rows", {random_tensor(rng, {5, 4})}, [w](Graph&, std::span<const Var> x) {
                       static const std::size_t rows[] = {4, 0, 4};
                       return contract(gather_rows(x[0], rows), w);
                     }});
  }
  {
    Tensor w = weights({4});
    cases.push_back({"column", {random_tensor(rng, {4, 3})},
                     [w](Graph&, std::span<const Var> x) { return contract(column(x[0], 1), w); }});
  }
  for (bool first_only : {false, true}) {
    // Two sequences of length 4, d = 4, two heads; the second sequence is padded.
    const std::size_t rows_out = first_only ? 2 : 8;
    Tensor w = weights({rows_out, 4});
    cases.push_back({first_only ? "self_attention_cls" : "self_attention",
                     {random_tensor(rng, {8, 12}, -1.5, 1.5)}, [w, first_only](Graph&, std::span<const Var> x) {
                       static const std::uint8_t mask[] = {1, 1, 1, 1, 1, 1, 0, 0};
                       AttentionLayout layout{2, 4, 2, mask, first_only};
                       return contract(self_attention(x[0], layout), w);
                     }});
  }
  {
    Tensor w = weights({3});
    cases.push_back({"cosine_distance_rows", {random_nonzero(rng, {3, 5}), random_nonzero(rng, {3, 5})},
                     [w](Graph&, std::span<const Var> x) { return contract(cosine_distance_rows(x[0], x[1]), w); }});
  }
  {
    std::vector<double> y;
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 6; ++i) y.push_back(coin(rng) ? 1.0 : 0.0);
    cases.push_back({"bce_loss", {random_tensor(rng, {6}, 0.05, 0.95)},
                     [y](Graph&, std::span<const Var> x) { return bce_loss(x[0], y); }});
  }
  return cases;
}

}  // namespace

std::vector<NamedReport> check_primitives(std::uint64_t seed, int instances, double eps, double tol) {
  std::mt19937_64 rng(seed);
  std::vector<NamedReport> out;
  std::vector<std::vector<GradCheckReport>> per_case;
  for (int k = 0; k < instances; ++k) {
    std::vector<Case> cases = make_cases(rng);
    if (per_case.empty()) {
      per_case.resize(cases.size());
      for (const Case& c : cases) out.push_back({c.name, {}});
    }
    for (std::size_t i = 0; i < cases.size(); ++i) {
      per_case[i].push_back(finite_diff_check(from_graph(cases[i].fn), cases[i].inputs, eps, tol));
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].report = merge(per_case[i]);
  return out;
}

}  // namespace xlt::num
