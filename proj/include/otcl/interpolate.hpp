#pragma once

#include <variant>

#include "otcl/measure.hpp"
#include "otcl/ot.hpp"

namespace otcl {

using MeasureVariant = std::variant<DiscreteMeasure, GaussianMeasure>;

struct WassersteinCurve {
  enum class Provenance { geodesic, flow, user };
  std::vector<double> times;  // strictly increasing
  std::vector<MeasureVariant> measures;
  Provenance provenance = Provenance::user;

  void validate() const;
  size_t size() const { return times.size(); }
};

struct InterpolationResult {
  DiscreteMeasure measure;
  // Total mass-weighted snap distance and the largest single snap (grids).
  double snapped_mass_distance = 0.0;
  double max_snap_distance = 0.0;
  bool snap_exceeded_half_pitch = false;  // flagged, not fatal
};

// McCann interpolation of an optimal plan: each cell (x_i -> y_j, pi_ij) is
// pushed to the parameter-t point of a geodesic from x_i to y_j. FiniteSpace
// needs a midpoint-table entry per used (i,j,t); grids snap (1-t)x + t y to
// the nearest atom and report the snap budget.
InterpolationResult displacement_interpolate(const GroundSpace& space, const TransportPlan& plan,
                                             double t);

// W2 geodesic between Gaussians; dim-1 reduces to sigma_t = (1-t)s0 + t s1.
GaussianMeasure gaussian_interpolate(const GaussianMeasure& g0, const GaussianMeasure& g1,
                                     double t);

// Geodesic sampled on a t-grid (defaults to 17 uniform points).
WassersteinCurve geodesic_curve(const GroundSpace& space, const TransportPlan& plan,
                                std::span<const double> t_grid, double* snap_budget = nullptr);
WassersteinCurve gaussian_geodesic_curve(const GaussianMeasure& g0, const GaussianMeasure& g1,
                                         std::span<const double> t_grid);

}  // namespace otcl
