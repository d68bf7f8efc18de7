#include "otcl/functionals.hpp"

#include <cmath>
#include <sstream>

namespace otcl {

EnergySpec EnergySpec::boltzmann() {
  EnergySpec e;
  e.kind = Kind::boltzmann;
  return e;
}

EnergySpec EnergySpec::internal(std::function<double(double)> U) {
  if (!U) throw PreconditionError("EnergySpec: U required for internal energy");
  if (std::fabs(U(0.0)) > 1e-12) throw PreconditionError("EnergySpec: U(0) must be 0");

  // Convexity and superlinear growth probed at sample points; recorded, not proven.
  std::ostringstream note;
  bool convex_ok = true, growth_ok = true;
  for (double r = 1.0 / 1024.0; r <= 1024.0; r *= 2.0) {
    double a = 0.5 * r, b = 2.0 * r, mid = U(0.5 * (a + b));
    if (mid > 0.5 * (U(a) + U(b)) + 1e-9 * (1.0 + std::fabs(mid))) convex_ok = false;
    if (U(2.0 * r) / 2.0 < U(r) - 1e-9 * (1.0 + std::fabs(U(r)))) growth_ok = false;
  }
  if (!convex_ok) throw PreconditionError("EnergySpec: U failed the convexity probe");
  note << "U probe on r = 2^-10..2^10: convex ok, growth "
       << (growth_ok ? "ok" : "NOT confirmed (U(2r)/2 < U(r) at a probe point)");

  EnergySpec e;
  e.kind = Kind::internal;
  e.U = std::move(U);
  e.probe_note = note.str();
  return e;
}

EnergySpec EnergySpec::potential_energy(std::vector<double> per_atom_values) {
  for (double v : per_atom_values)
    if (!std::isfinite(v)) throw PreconditionError("EnergySpec: potential values must be finite");
  EnergySpec e;
  e.kind = Kind::potential;
  e.potential = std::move(per_atom_values);
  return e;
}

double atom_ref_weight(const GroundSpace& space, int atom) {
  if (const auto* f = std::get_if<FiniteSpace>(&space)) return f->ref_weights[static_cast<size_t>(atom)];
  if (const auto* g = std::get_if<EuclideanGrid>(&space)) return g->ref_weight(atom);
  throw PreconditionError("atom_ref_weight: GaussianAnalytic has no atoms");
}

double entropy(const GroundSpace& space, const DiscreteMeasure& mu) {
  if (std::holds_alternative<GaussianAnalytic>(space)) return kInf;  // atoms are singular wrt gamma
  mu.check_space(space);
  double s = 0.0;
  for (size_t k = 0; k < mu.size(); ++k) {
    double m = atom_ref_weight(space, mu.support[k]);
    if (!(m > 0.0)) return kInf;
    double p = mu.weights[k];
    s += p * std::log(p / m);
  }
  return s;
}

double internal_energy(const GroundSpace& space, const DiscreteMeasure& mu,
                       const std::function<double(double)>& U) {
  if (std::holds_alternative<GaussianAnalytic>(space)) return kInf;
  mu.check_space(space);
  double s = 0.0;
  for (size_t k = 0; k < mu.size(); ++k) {
    double m = atom_ref_weight(space, mu.support[k]);
    if (!(m > 0.0)) return kInf;
    s += m * U(mu.weights[k] / m);
  }
  return s;
}

double potential_energy(const DiscreteMeasure& mu, std::span<const double> f) {
  double s = 0.0;
  for (size_t k = 0; k < mu.size(); ++k) {
    int a = mu.support[k];
    if (a < 0 || static_cast<size_t>(a) >= f.size())
      throw PreconditionError("potential_energy: f missing on a support atom");
    s += mu.weights[k] * f[static_cast<size_t>(a)];
  }
  return s;
}

double gaussian_entropy(const GaussianMeasure& g, GaussianReference reference) {
  const int d = g.dim();
  const double logdet = log_det_spd(g.cov);
  if (reference == GaussianReference::lebesgue)
    return -0.5 * (d * std::log(2.0 * M_PI * std::exp(1.0)) + logdet);
  return 0.5 * (g.cov.trace() + g.mean.squaredNorm() - d - logdet);
}

double energy_of(const GroundSpace& space, const EnergySpec& energy, const DiscreteMeasure& mu) {
  switch (energy.kind) {
    case EnergySpec::Kind::boltzmann:
      return entropy(space, mu);
    case EnergySpec::Kind::internal:
      return internal_energy(space, mu, energy.U);
    case EnergySpec::Kind::potential:
      return potential_energy(mu, energy.potential);
  }
  throw PreconditionError("energy_of: unknown energy kind");
}

double energy_of_gaussian(GaussianReference ref, const EnergySpec& energy,
                          const GaussianMeasure& g) {
  if (energy.kind != EnergySpec::Kind::boltzmann)
    throw PreconditionError("energy_of_gaussian: only Boltzmann entropy has a closed form");
  return gaussian_entropy(g, ref);
}

}  // namespace otcl
