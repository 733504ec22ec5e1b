#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracmp/grid_operator.hpp"

namespace fracmp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

bool all_passed(const std::vector<CheckResult>& checks);

/// Structural invariants of the assembled operator: exact symmetry, sign
/// pattern, positive definiteness, inverse positivity of A + M I for
/// M in {0, 1, 10}, discrete integration by parts, the zero-node sign rule,
/// the negative-part identity and agreement with gagliardo_form under
/// refinement.
std::vector<CheckResult> operator_checks(const Grid& grid, double s, std::uint64_t seed = 3);

struct VerifyConfig {
  Grid grid = build_grid(-1.0, 1.0, 64);
  double s = 0.4;
  double p = 2.0;
  double R = 0.0;  ///< <= 0 picks default_truncation_level
  double lambda = 100.0;
  std::uint64_t seed = 3;
};

/// operator_checks plus normalization constant, nonlinearity, gradient,
/// comparison principle, monotone ordering, slope fitting and Moser
/// constant checks.
std::vector<CheckResult> verify_all(const VerifyConfig& cfg);

}  // namespace fracmp
