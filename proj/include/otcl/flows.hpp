#pragma once

#include "otcl/functionals.hpp"
#include "otcl/interpolate.hpp"

namespace otcl {

struct FlowSpec {
  enum class Scheme { closed_form_heat, closed_form_ou, jko };
  EnergySpec energy;
  double K = 0.0;  // target convexity modulus, carried to the checkers
  Scheme scheme = Scheme::jko;
  double tau = 0.0;
  int steps = 0;

  static FlowSpec jko(EnergySpec energy, double tau, int steps, double K = 0.0);
  static FlowSpec heat(double K = 0.0);
  static FlowSpec ou(double K = 1.0);
};

// Entropy flow wrt Lebesgue: N(m, S + 2tI).
GaussianMeasure heat_flow_gaussian(const GaussianMeasure& g0, double t);

// Entropy flow wrt gamma (Ornstein-Uhlenbeck): N(e^{-t} m, e^{-2t} S + (1 - e^{-2t}) I).
GaussianMeasure ou_flow_gaussian(const GaussianMeasure& g0, double t);

WassersteinCurve gaussian_flow_curve(const GaussianMeasure& g0, FlowSpec::Scheme scheme,
                                     std::span<const double> times);

struct JkoStepResult {
  DiscreteMeasure measure;
  double objective = 0.0;  // E(nu) + W2^2(nu, mu)/(2 tau), exact W2
  double energy = 0.0;
  bool converged = true;   // false when the annealing floor was hit
  int levels = 0;
  double final_delta = 0.0;
};

// One minimizing-movement step over the full reference support:
//   argmin_nu E(nu) + W2^2(nu, mu) / (2 tau),
// solved by proximal Sinkhorn with the smoothing halved per level until the
// exact objective changes by less than 1e-9, or until the smoothing reaches
// the squared metric resolution of the space (below which no further mass
// movement is resolvable). The output never scores worse than the nu = mu
// competitor; converged is false only when the final level hit its iteration
// cap without settling.
JkoStepResult jko_step(const GroundSpace& space, const DiscreteMeasure& mu, double tau,
                       const EnergySpec& energy);

// Iterated steps; timestamps k*tau, start included at t = 0. Energy along the
// curve is non-increasing.
WassersteinCurve jko_trajectory(const GroundSpace& space, const DiscreteMeasure& mu0,
                                const FlowSpec& spec);

}  // namespace otcl
