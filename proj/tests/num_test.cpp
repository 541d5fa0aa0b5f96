#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "xlt/error.hpp"
#include "xlt/num/adam.hpp"
#include "xlt/num/gradcheck.hpp"
#include "xlt/num/gradcheck_suite.hpp"
#include "xlt/num/losses.hpp"
#include "xlt/num/ops.hpp"

using namespace xlt::num;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("cosine_distance reference points") {
  const std::vector<double> a{3, 4};
  CHECK(cosine_distance(a, a) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cosine_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == doctest::Approx(1.0));
  CHECK(cosine_distance(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) == doctest::Approx(2.0));
}

TEST_CASE("cosine_distance rejects zero vectors") {
  CHECK_THROWS_AS(cosine_distance(std::vector<double>{0, 0}, std::vector<double>{1, 0}), xlt::DomainError);
  Graph g;
  Var a = g.leaf(Tensor::matrix(1, 2, {0, 0}), true);
  Var b = g.leaf(Tensor::matrix(1, 2, {1, 0}), true);
  CHECK_THROWS_AS(cosine_distance_rows(a, b), xlt::DomainError);
}

TEST_CASE("cosine_distance is symmetric and scale invariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> scale_dist(0.01, 100.0);
  for (int i = 0; i < 200; ++i) {
    auto a = random_vec(rng, 6), b = random_vec(rng, 6);
    const double d = cosine_distance(a, b);
    CHECK(d >= 0.0);
    CHECK(d <= 2.0);
    CHECK(cosine_distance(b, a) == doctest::Approx(d).epsilon(1e-14));
    const double c = scale_dist(rng);
    for (double& x : a) x *= c;
    CHECK(cosine_distance(a, b) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("bce_loss reference values") {
  CHECK(bce_loss(std::vector<double>{0.5}, std::vector<double>{1}) == doctest::Approx(0.6931471805599453));
  CHECK(bce_loss(std::vector<double>{1.0 - kProbClamp}, std::vector<double>{1}) ==
        doctest::Approx(1.0000000494736474e-07).epsilon(1e-9));
  CHECK(bce_loss(std::vector<double>{0.9, 0.2}, std::vector<double>{1, 0}) ==
        doctest::Approx(0.164252033486018).epsilon(1e-13));
  // Saturated predictions stay finite.
  CHECK(std::isfinite(bce_loss(std::vector<double>{0.0, 1.0}, std::vector<double>{1, 0})));
  CHECK_THROWS_AS(bce_loss(std::vector<double>{0.5, 0.5}, std::vector<double>{1}), xlt::ShapeError);
}

TEST_CASE("bce_loss is non-negative") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> ps(5), ys(5);
    for (int j = 0; j < 5; ++j) {
      ps[j] = p(rng);
      ys[j] = coin(rng) ? 1.0 : 0.0;
    }
    CHECK(bce_loss(ps, ys) >= 0.0);
  }
}

TEST_CASE("backward of x^2 at 3 is 6") {
  Graph g;
  Var x = g.leaf(Tensor::scalar(3.0), true);
  Var y = mul(x, x);
  g.backward(y);
  CHECK(g.grad(x).item() == doctest::Approx(6.0));
}

TEST_CASE("cosine gradient vanishes at the aligned point") {
  Graph g;
  Var a = g.leaf(Tensor::vector({0.3, -1.2, 2.0}), true);
  Var b = g.leaf(Tensor::vector({0.3, -1.2, 2.0}), false);
  g.backward(cosine_distance(a, b));
  for (double v : g.grad(a).data()) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("matmul-then-sum gradient agrees with central differences") {
  std::mt19937_64 rng(3);
  auto a = Tensor::matrix(3, 4, random_vec(rng, 12));
  auto b = Tensor::matrix(4, 2, random_vec(rng, 8));
  auto fn = from_graph([](Graph&, std::span<const Var> x) { return sum(matmul(x[0], x[1])); });
  const auto report = finite_diff_check(fn, {a, b}, 1e-5, 1e-6);
  CHECK(report.passed);
  CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("backward contract") {
  Graph g;
  Var x = g.leaf(Tensor::vector({1.0, 2.0}), true);
  Var unused = g.leaf(Tensor::vector({5.0, 6.0}), true);
  CHECK_THROWS_AS(g.backward(scale(x, 2.0)), xlt::ContractError);
  g.backward(sum(x));
  CHECK(g.grad(unused) == Tensor(Shape{2}));
  CHECK(g.grad(x) == Tensor::vector({1.0, 1.0}));
}

TEST_CASE("gradients are linear in the loss") {
  std::mt19937_64 rng(5);
  const Tensor xv = Tensor::matrix(2, 3, random_vec(rng, 6));
  const Tensor wv = Tensor::matrix(3, 3, random_vec(rng, 9));
  auto loss1 = [&](Var x, Var w) { return sum(tanh(matmul(x, w))); };
  auto loss2 = [&](Var x, Var w) { return mean(softmax_rows(matmul(x, w))); };

  auto grads = [&](int which) {
    Graph g;
    Var x = g.leaf(xv, true), w = g.leaf(wv, true);
    Var l = which == 1 ? loss1(x, w) : which == 2 ? loss2(x, w) : add(loss1(x, w), loss2(x, w));
    g.backward(l);
    return std::pair{g.grad(x), g.grad(w)};
  };
  auto [x1, w1] = grads(1);
  auto [x2, w2] = grads(2);
  auto [x3, w3] = grads(3);
  for (std::size_t i = 0; i < x3.numel(); ++i) CHECK(x3[i] == doctest::Approx(x1[i] + x2[i]).epsilon(1e-13));
  for (std::size_t i = 0; i < w3.numel(); ++i) CHECK(w3[i] == doctest::Approx(w1[i] + w2[i]).epsilon(1e-13));
}

TEST_CASE("adam: zero gradient leaves parameters untouched") {
  Tensor p = Tensor::vector({1.0, -2.0});
  const Tensor before = p;
  AdamState st;
  std::vector<Tensor*> params{&p};
  std::vector<Tensor> grads{Tensor(Shape{2})};
  adam_step(params, grads, st);
  CHECK(p == before);
  CHECK(st.t == 1);
  adam_step(params, grads, st);
  CHECK(st.t == 2);
}

TEST_CASE("adam: first step moves by lr in the direction of -sign(g)") {
  Tensor p = Tensor::vector({0.0, 0.0, 0.0});
  AdamState st;
  st.lr = 0.01;
  std::vector<Tensor*> params{&p};
  std::vector<Tensor> grads{Tensor::vector({2.5, -0.3, 1e-2})};
  adam_step(params, grads, st);
  CHECK(p[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(p[2] == doctest::Approx(-0.01).epsilon(1e-5));
}

TEST_CASE("adam matches a scalar reference on x^2") {
  // Independent scalar Adam.
  double x_ref = 1.0, m = 0.0, v = 0.0;
  std::vector<double> expected;
  for (int t = 1; t <= 10; ++t) {
    const double g = 2.0 * x_ref;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    x_ref -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    expected.push_back(x_ref);
  }

  Tensor x = Tensor::scalar(1.0);
  AdamState st;
  st.lr = 0.1;
  std::vector<Tensor*> params{&x};
  for (int t = 0; t < 10; ++t) {
    Graph g;
    Var xv = g.leaf_ref(x, true);
    g.backward(mul(xv, xv));
    std::vector<Tensor> grads{g.grad(xv)};
    adam_step(params, grads, st);
    CHECK(std::abs(x.item() - expected[t]) < 1e-12);
  }
}

TEST_CASE("adam rejects mismatched shapes") {
  Tensor p = Tensor::vector({1.0, 2.0});
  AdamState st;
  std::vector<Tensor*> params{&p};
  std::vector<Tensor> grads{Tensor::vector({1.0, 2.0, 3.0})};
  CHECK_THROWS_AS(adam_step(params, grads, st), xlt::ShapeError);
  std::vector<Tensor> none;
  CHECK_THROWS_AS(adam_step(params, none, st), xlt::ShapeError);
}

TEST_CASE("finite_diff_check on a linear function is exact") {
  const Tensor a = Tensor::vector({0.5, -1.5, 2.0, 3.25});
  auto fn = from_graph([a](Graph& g, std::span<const Var> x) { return sum(mul(g.leaf(a), x[0])); });
  const auto report = finite_diff_check(fn, {Tensor::vector({1.0, 2.0, -3.0, 0.1})}, 1e-5, 1e-10);
  CHECK(report.passed);
  CHECK(report.max_rel_error < 1e-10);
}

TEST_CASE("finite_diff_check on softmax then BCE") {
  std::mt19937_64 rng(19);
  const std::vector<double> y{1, 0, 0, 1, 1, 0, 1, 0};
  auto fn = from_graph([y](Graph&, std::span<const Var> x) { return bce_loss(softmax_rows(x[0]), y); });
  const auto report = finite_diff_check(fn, {Tensor::matrix(1, 8, random_vec(rng, 8))}, 1e-5, 1e-6);
  CHECK(report.passed);
  CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("finite_diff_check flags a gradient scaled by two") {
  std::mt19937_64 rng(23);
  auto fn = from_graph([](Graph&, std::span<const Var> x) { return sum(tanh(x[0])); });
  auto broken = fn;
  broken.gradient = [inner = fn.gradient](std::span<const Tensor> in) {
    auto g = inner(in);
    for (Tensor& t : g)
      for (double& v : t.data()) v *= 2.0;
    return g;
  };
  const auto report = finite_diff_check(broken, {Tensor::vector(random_vec(rng, 5))}, 1e-5, 1e-4);
  CHECK_FALSE(report.passed);
  // |2g - g| / max(|2g|, |g|)
  CHECK(report.max_rel_error == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(finite_diff_check(fn, {Tensor::scalar(1.0)}, 1e-2, 1e-4), xlt::ContractError);
}

TEST_CASE("every primitive passes the gradient check") {
  const auto reports = check_primitives(2024, 20, 1e-5, 1e-4);
  CHECK(reports.size() >= 20);
  for (const auto& r : reports) {
    INFO(r.name << ": " << r.report.summary());
    CHECK(r.report.passed);
    CHECK(r.report.max_rel_error < 1e-4);
  }
}

TEST_CASE("attention ignores padded keys") {
  std::mt19937_64 rng(31);
  // One sequence of 3 real tokens, then the same with two pad rows appended.
  const auto base = random_vec(rng, 3 * 6);
  auto padded = base;
  const auto junk = random_vec(rng, 2 * 6);
  padded.insert(padded.end(), junk.begin(), junk.end());

  Graph g(false);
  const std::uint8_t m3[] = {1, 1, 1};
  const std::uint8_t m5[] = {1, 1, 1, 0, 0};
  Var a = self_attention(g.leaf(Tensor::matrix(3, 6, base)), {1, 3, 2, m3, false});
  Var b = self_attention(g.leaf(Tensor::matrix(5, 6, padded)), {1, 5, 2, m5, false});
  for (std::size_t i = 0; i < 3 * 2; ++i) CHECK(std::abs(a.value()[i] - b.value()[i]) < 1e-15);
}
