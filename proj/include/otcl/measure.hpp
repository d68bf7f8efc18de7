#pragma once

#include <span>
#include <vector>

#include "otcl/linalg.hpp"
#include "otcl/space.hpp"

namespace otcl {

// Probability measure as weighted atoms of a ground space. Support indices are
// kept sorted; weights below kWeightFloor are pruned on construction.
struct DiscreteMeasure {
  std::vector<int> support;
  std::vector<double> weights;

  static DiscreteMeasure create(std::span<const int> support, std::span<const double> weights);
  // Dirac at one atom.
  static DiscreteMeasure dirac(int atom);
  // Uniform over the given atoms.
  static DiscreteMeasure uniform(std::span<const int> atoms);

  size_t size() const { return support.size(); }
  // Weight carried by atom `a`, 0 if outside the support.
  double weight_of(int a) const;
  void check_space(const FiniteSpace& s) const;
  void check_space(const EuclideanGrid& g) const;
  void check_space(const GroundSpace& s) const;

  bool operator==(const DiscreteMeasure&) const = default;
};

struct GaussianMeasure {
  Vector mean;
  Matrix cov;

  static GaussianMeasure create(Vector mean, Matrix cov);
  static GaussianMeasure standard(int dim);
  int dim() const { return static_cast<int>(mean.size()); }
};

// Coupling pi in Pi(mu, nu) together with its quadratic cost and the dual
// potentials certifying optimality (exact solves) or the regularization used
// (entropic solves).
struct TransportPlan {
  DiscreteMeasure source, target;
  std::vector<double> matrix;  // |source| x |target| row-major
  double cost = 0.0;
  std::vector<double> dual_source, dual_target;
  double max_marginal_violation = 0.0;
  double epsilon = 0.0;   // 0 for exact plans
  bool converged = true;  // false only when an iterative solve hit its cap

  double at(size_t i, size_t j) const { return matrix[i * target.size() + j]; }
  // Recomputes row/column sums against the stated marginals.
  double marginal_violation() const;
};

}  // namespace otcl
