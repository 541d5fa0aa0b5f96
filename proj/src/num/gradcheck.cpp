// SPDX-License-Identifier: Apache-2.0
#include "xlt/num/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xlt/error.hpp"

namespace xlt::num {

DifferentiableFn from_graph(GraphFn fn) {
  DifferentiableFn out;
  out.value = [fn](std::span<const Tensor> inputs) {
    Graph g(false);
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(g.leaf_ref(t, false));
    return fn(g, vars).value().item();
  };
  out.gradient = [fn](std::span<const Tensor> inputs) {
    Graph g(true);
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(g.leaf_ref(t, true));
    g.backward(fn(g, vars));
    std::vector<Tensor> grads;
    for (const Var& v : vars) grads.push_back(g.grad(v));
    return grads;
  };
  return out;
}

GradCheckReport finite_diff_check(const DifferentiableFn& fn, std::vector<Tensor> inputs, double eps,
                                  double tol) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw ContractError("finite_diff_check: eps must lie in [1e-7, 1e-3]");
  const std::vector<Tensor> analytic = fn.gradient(inputs);
  if (analytic.size() != inputs.size()) throw ShapeError("finite_diff_check: gradient count mismatch");

  GradCheckReport report;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (analytic[i].numel() != inputs[i].numel()) throw ShapeError("finite_diff_check: gradient shape mismatch");
    for (std::size_t j = 0; j < inputs[i].numel(); ++j) {
      const double saved = inputs[i][j];
      inputs[i][j] = saved + eps;
      const double up = fn.value(inputs);
      inputs[i][j] = saved - eps;
      const double down = fn.value(inputs);
      inputs[i][j] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i][j];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
      const double rel = std::abs(a - numeric) / denom;
      ++report.coordinates;
      if (!(rel < tol)) ++report.failures;
      if (rel > report.max_rel_error || !std::isfinite(rel)) {
        report.max_rel_error = rel;
        report.worst = "input " + std::to_string(i) + "[" + std::to_string(j) + "]";
      }
    }
  }
  report.passed = report.failures == 0;
  return report;
}

GradCheckReport merge(std::span<const GradCheckReport> reports) {
  GradCheckReport out;
  for (const GradCheckReport& r : reports) {
    out.coordinates += r.coordinates;
    out.failures += r.failures;
    if (r.max_rel_error >= out.max_rel_error) {
      out.max_rel_error = r.max_rel_error;
      out.worst = r.worst;
    }
  }
  out.passed = out.failures == 0;
  return out;
}

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " coords=" << coordinates << " failures=" << failures
     << " max_rel_error=" << max_rel_error;
  if (!worst.empty()) os << " worst=" << worst;
  return os.str();
}

}  // namespace xlt::num
