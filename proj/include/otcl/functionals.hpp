#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "otcl/measure.hpp"
#include "otcl/space.hpp"

namespace otcl {

enum class GaussianReference { lebesgue, standard_gaussian };

// Boltzmann entropy, an internal energy with a user-supplied convex U
// (U(0) = 0), or a potential energy with per-atom values. The convexity and
// superlinearity of U cannot be proven from samples; a probe on a geometric
// grid records the evidence instead.
struct EnergySpec {
  enum class Kind { boltzmann, internal, potential };
  Kind kind = Kind::boltzmann;
  std::function<double(double)> U;      // internal only
  std::vector<double> potential;        // potential only, one value per atom
  std::string probe_note;               // filled by make_internal

  static EnergySpec boltzmann();
  static EnergySpec internal(std::function<double(double)> U);
  static EnergySpec potential_energy(std::vector<double> per_atom_values);
};

// Reference weight of one atom of a discrete ground space.
double atom_ref_weight(const GroundSpace& space, int atom);

// Boltzmann entropy sum_i p_i ln(p_i / m_i) with the 0 ln 0 = 0 convention;
// +inf as soon as the support touches an atom with zero reference weight.
double entropy(const GroundSpace& space, const DiscreteMeasure& mu);

// sum_i m_i U(p_i / m_i); +inf on singular mass.
double internal_energy(const GroundSpace& space, const DiscreteMeasure& mu,
                       const std::function<double(double)>& U);

// sum_i p_i f(x_i). Throws if f is missing on a support atom.
double potential_energy(const DiscreteMeasure& mu, std::span<const double> f);

// Closed forms: wrt Lebesgue -1/2 ln((2 pi e)^d det S);
// wrt the standard Gaussian 1/2 (tr S + |m|^2 - d - ln det S).
double gaussian_entropy(const GaussianMeasure& g, GaussianReference reference);

// Energy of a measure variant against a ground-space / reference pair.
double energy_of(const GroundSpace& space, const EnergySpec& energy, const DiscreteMeasure& mu);
double energy_of_gaussian(GaussianReference ref, const EnergySpec& energy,
                          const GaussianMeasure& g);

}  // namespace otcl
