#pragma once

#include <span>
#include <vector>

#include "otcl/common.hpp"

namespace otcl {

// Equality-form LP: min c.x s.t. A x = rhs, x >= 0, rhs >= 0.
// Columns are sparse; duplicate row entries within a column are not allowed.
struct LpColumn {
  std::vector<std::pair<int, double>> entries;
  double cost = 0.0;
};

struct LpResult {
  std::vector<double> x;
  double objective = 0.0;
  bool feasible = true;
  long pivots = 0;
};

// Two-phase revised simplex with a dense basis inverse. Pricing is Dantzig
// with smallest-index tie-break, falling back to Bland after a long run of
// degenerate pivots so cycling cannot occur. Deterministic.
LpResult solve_lp(std::span<const double> rhs, std::span<const LpColumn> columns);

}  // namespace otcl
