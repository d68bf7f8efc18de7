#pragma once

#include <span>

#include "otcl/measure.hpp"
#include "otcl/space.hpp"

namespace otcl {

// Pairwise squared distances between two support sets of one ground space.
std::vector<double> sq_cost_matrix(const GroundSpace& space, std::span<const int> src,
                                   std::span<const int> tgt);

// dim-major packed coordinates of a grid support.
std::vector<double> pack_coords(const EuclideanGrid& grid, std::span<const int> support);

// Exact quadratic optimal transport. The returned plan carries dual
// potentials (alpha, beta) with alpha_i + beta_j <= d^2(x_i, y_j) on every
// finite cell, tight on cells carrying mass. Throws InfeasibleError when +inf
// distances disconnect the marginals.
TransportPlan solve_ot_exact(const GroundSpace& space, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu);

// Test oracle: enumerate all permutation couplings. Requires uniform marginals
// of equal size <= 7 (optimal by Birkhoff extremality for uniform marginals).
TransportPlan oracle_ot_bruteforce(const GroundSpace& space, const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu);

inline constexpr long kSinkhornCap = 100000;

// Log-domain Sinkhorn for the epsilon-regularized problem
//   min <d^2, pi> + epsilon KL(pi | mu x nu).
// Stops when the worst marginal violation drops below 1e-9 or at the
// iteration cap (plan flagged not converged).
TransportPlan solve_ot_entropic(const GroundSpace& space, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, double epsilon);

// W2(mu, nu); +inf when no finite-cost coupling exists. Symmetric exactly
// (arguments are ordered canonically before solving).
double w2(const GroundSpace& space, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Bures-Wasserstein closed form:
//   W2^2 = |m1-m2|^2 + tr(S1 + S2 - 2 (S2^{1/2} S1 S2^{1/2})^{1/2}).
double w2_gaussian_sq(const GaussianMeasure& g1, const GaussianMeasure& g2);
double w2_gaussian(const GaussianMeasure& g1, const GaussianMeasure& g2);

}  // namespace otcl
