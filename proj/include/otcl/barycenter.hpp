#pragma once

#include <variant>

#include "otcl/interpolate.hpp"
#include "otcl/measure.hpp"

namespace otcl {

// Finitely supported probability measure over measures.
struct MixtureOmega {
  struct Component {
    double lambda;
    MeasureVariant measure;
  };
  std::vector<Component> components;

  static MixtureOmega create(std::vector<Component> components);
  size_t size() const { return components.size(); }
  bool gaussian() const;  // all components Gaussian (else all discrete)
};

// Weighted points in R^d, the natural carrier for free-support barycenters.
struct FreePoints {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
};

using BarycenterMeasure = std::variant<DiscreteMeasure, GaussianMeasure, FreePoints>;

struct BarycenterResult {
  BarycenterMeasure measure;
  double objective = 0.0;  // sum_j lambda_j W2^2(measure, mu_j)
  double epsilon = 0.0;    // certified gap to the best value over the searched class
  bool certified = true;   // false: epsilon is only a regularization bound
  bool converged = true;   // fixed-point / iterative solvers
  double residual = 0.0;
  long pivots = 0;
};

// W2^2 between two components of one mixture (exact LP for discrete pairs,
// Bures closed form for Gaussian pairs).
double w2_sq_between(const GroundSpace& space, const MeasureVariant& a, const MeasureVariant& b);

// min over the supplied candidates of sum_j lambda_j W2^2(nu, mu_j); an upper
// bound for Var(Omega). Returns the value and the index of the minimizer.
std::pair<double, size_t> variance_over(const GroundSpace& space, const MixtureOmega& omega,
                                        std::span<const MeasureVariant> candidates);

// Exact minimizer over measures on a fixed support, through one joint LP: the
// k plans share their first marginal nu, each second marginal is pinned to
// mu_j. epsilon = 0 relative to the fixed-support class.
BarycenterResult barycenter_fixed_support(const GroundSpace& space, const MixtureOmega& omega,
                                          std::span<const int> support);

inline constexpr long kTupleCap = 1000000;

// Multi-marginal LP over support tuples with cost sum_j lambda_j |x_j - B|^2,
// B the weighted average; the optimal multi-plan pushed forward under B. The
// free-support oracle on Euclidean grids.
BarycenterResult barycenter_multimarginal(const GroundSpace& space, const MixtureOmega& omega);

// Bures fixed point S -> S^{-1/2} (sum_j lambda_j (S^{1/2} S_j S^{1/2})^{1/2})^2 S^{-1/2},
// iterated to 1e-12 max-abs change (cap 1e4, flagged when hit); the mean is
// the weighted average of means. dim-1 closed form sigma = sum lambda_j sigma_j.
BarycenterResult gaussian_barycenter(const MixtureOmega& omega);

// Iterative Bregman projections on the fixed support. When certify_with_lp,
// epsilon = |objective - fixed-support LP objective|; otherwise epsilon is
// the regularization-induced bound and the result is flagged uncertified.
BarycenterResult barycenter_sinkhorn(const GroundSpace& space, const MixtureOmega& omega,
                                     std::span<const int> support, double epsilon_reg,
                                     bool certify_with_lp = false);

}  // namespace otcl
