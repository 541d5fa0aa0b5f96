// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xlt/num/gradcheck.hpp"

namespace xlt::num {

struct NamedReport {
  std::string name;
  GradCheckReport report;
};

/// Runs finite_diff_check on every differentiable primitive over `instances`
/// random inputs each. Outputs are contracted with a random weight tensor so
/// that every coordinate carries a generic, non-vanishing gradient.
std::vector<NamedReport> check_primitives(std::uint64_t seed, int instances, double eps, double tol);

}  // namespace xlt::num
