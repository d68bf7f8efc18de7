#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "otcl/common.hpp"
#include "otcl/linalg.hpp"

namespace otcl {

// Finite (extended) metric measure space: n atoms, symmetric distance matrix
// with +inf entries allowed, nonnegative reference weights (not necessarily a
// probability), and an optional midpoint table for geodesic interpolation.
struct FiniteSpace {
  int n = 0;
  std::vector<double> dist;         // n*n row-major
  std::vector<double> ref_weights;  // size n

  struct Midpoint {
    int i, j, k;  // point k sits at parameter t on a geodesic from i to j
    double t;
  };
  std::vector<Midpoint> midpoints;

  double d(int i, int j) const { return dist[static_cast<size_t>(i) * n + j]; }

  // Lookup is symmetric: an entry for (i,j,t) also answers (j,i,1-t).
  std::optional<int> midpoint(int i, int j, double t, double t_tol = 1e-12) const;
};

struct Lebesgue {};

struct GaussianRef {
  Vector mean;
  Matrix cov;
};

// Tensor-product grid of atoms in R^dim. Atoms are indexed row-major over the
// axes (last axis fastest). The reference measure is cell_volume (Lebesgue) or
// cell_volume times the Gaussian density at the atom.
struct EuclideanGrid {
  int dim = 0;
  std::vector<std::vector<double>> axes;  // per-dimension sorted coordinates
  std::vector<double> cell_volumes;       // per atom
  std::variant<Lebesgue, GaussianRef> reference = Lebesgue{};

  int atom_count() const;
  void atom_coords(int idx, double* out) const;
  std::vector<double> atom_coords(int idx) const;
  // Reference weight of one atom (volume, or volume * gaussian density).
  double ref_weight(int idx) const;
  double sq_dist(int i, int j) const;
  double diameter_sq() const;
  // Nearest atom to an arbitrary point; ties resolve to the smaller index
  // per axis. Returns the atom and the snap distance.
  std::pair<int, double> nearest_atom(std::span<const double> point) const;
  bool is_lebesgue() const { return std::holds_alternative<Lebesgue>(reference); }
};

// The continuum space (R^d, |.|, gamma_d); every operation on it is a closed
// form, nothing is stored beyond the dimension.
struct GaussianAnalytic {
  int dim = 1;
};

using GroundSpace = std::variant<FiniteSpace, EuclideanGrid, GaussianAnalytic>;

struct Violation {
  std::string rule;          // "symmetry", "triangle", ...
  std::vector<int> indices;  // offending atoms
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool triangle_checked = true;  // false when gated off for large n
  bool valid() const { return violations.empty(); }
};

// Atom-count threshold above which the O(n^3) triangle sweep requires an
// explicit opt-in.
inline constexpr int kTriangleGate = 500;

// Reports every violated space invariant; never throws on bad data.
ValidationReport validate_space(const GroundSpace& space, bool force_triangle = false);

struct PointBarycenter {
  std::vector<int> atoms;      // all minimizing atoms (FiniteSpace / grid snap)
  std::vector<double> point;   // continuum minimizer (Euclidean / Gaussian)
  double value = kInf;         // min of sum_i lambda_i d(z, x_i)^2
  double snap_distance = 0.0;  // grid only
  bool finite = true;          // false: no finite-variance candidate
};

// All minimizers of z -> sum_i lambda_i d(z, x_i)^2. Exhaustive over atoms on
// FiniteSpace; the continuum weighted average on Euclidean grids (snapped to
// the nearest atom, snap distance reported).
PointBarycenter point_barycenter(const GroundSpace& space, std::span<const int> points,
                                 std::span<const double> lambdas);

// Continuum overload for GaussianAnalytic / raw Euclidean inputs.
PointBarycenter point_barycenter_euclidean(std::span<const std::vector<double>> points,
                                           std::span<const double> lambdas);

// Atom index lists of a discrete ground space.
std::vector<int> all_atoms(const GroundSpace& space);
std::vector<int> reference_support(const GroundSpace& space);  // atoms with m_i > 0

}  // namespace otcl
