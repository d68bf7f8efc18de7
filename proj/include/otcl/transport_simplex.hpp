#pragma once

#include <span>
#include <vector>

#include "otcl/common.hpp"

namespace otcl {

struct TransportSolution {
  std::vector<double> flow;  // m*n row-major
  std::vector<double> alpha, beta;  // dual potentials, alpha[0] = 0;
                                    // alpha_i + beta_j <= cost_ij on finite cells
  double cost = 0.0;
  bool feasible = true;  // false: +inf cells disconnect the marginals
  long pivots = 0;
};

// Exact minimum-cost transportation between supply (size m) and demand
// (size n) under a dense m x n cost matrix; +inf entries mark forbidden
// cells. Network simplex on the full bipartite graph with strongly feasible
// bases; deterministic pivoting (block pricing, smallest-arc-id ties).
TransportSolution solve_transport(const double* cost, int m, int n,
                                  std::span<const double> supply,
                                  std::span<const double> demand);

}  // namespace otcl
