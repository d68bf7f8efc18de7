#include "otcl/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "otcl/ot.hpp"

namespace otcl {

double i_k(double K, double t) {
  if (t < 0.0) throw PreconditionError("i_k: t must be nonnegative");
  if (K == 0.0) return t;
  return std::expm1(K * t) / K;
}

std::string to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::pass:
      return "pass";
    case CheckOutcome::fail:
      return "fail";
    case CheckOutcome::vacuous:
      return "vacuous";
    case CheckOutcome::constraint_failed:
      return "constraint_failed";
  }
  return "unknown";
}

void CheckReport::finalize(double tol) {
  tolerance = tol;
  min_margin = kInf;
  min_witness.clear();
  for (const auto& r : rows) {
    if (r.margin < min_margin) {
      min_margin = r.margin;
      min_witness = r.witness;
    }
  }
  if (outcome == CheckOutcome::vacuous || outcome == CheckOutcome::constraint_failed) return;
  outcome = (rows.empty() || min_margin >= -tol) ? CheckOutcome::pass : CheckOutcome::fail;
}

namespace {

std::string fmt_t(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "t=%.6g", t);
  return buf;
}

std::string fmt_st(double s, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "s=%.6g,t=%.6g", s, t);
  return buf;
}

double auto_tol(const CheckOptions& opts, bool closed_form, double budget) {
  if (!std::isnan(opts.tolerance)) return opts.tolerance;
  return closed_form ? kCheckTol : std::max(1e-7, 4.0 * budget);
}

// margin rows for CD given endpoint entropies, W2^2 and a per-t entropy source
template <typename EntAt>
CheckReport cd_rows(double e0, double e1, double w2sq, double K, std::span<const double> t_grid,
                    EntAt&& ent_at) {
  CheckReport rep;
  rep.check = "cd";
  rep.params = {{"K", K}, {"w2sq", w2sq}, {"t_points", double(t_grid.size())}};
  if (!std::isfinite(e0) || !std::isfinite(e1)) {
    rep.outcome = CheckOutcome::vacuous;
    rep.notes.push_back("vacuous: an endpoint entropy is infinite");
    return rep;
  }
  for (double t : t_grid) {
    double rhs = (1.0 - t) * e0 + t * e1 - 0.5 * K * (1.0 - t) * t * w2sq;
    double lhs = ent_at(t);
    rep.rows.push_back({fmt_t(t), lhs, rhs, rhs - lhs});
  }
  rep.notes.push_back("inequality verified at sample points only");
  return rep;
}

}  // namespace

CheckReport check_cd(const GroundSpace& space, const DiscreteMeasure& mu0,
                     const DiscreteMeasure& mu1, double K, std::span<const double> t_grid,
                     const CheckOptions& opts) {
  const double e0 = entropy(space, mu0), e1 = entropy(space, mu1);
  if (!std::isfinite(e0) || !std::isfinite(e1)) {
    CheckReport rep = cd_rows(e0, e1, 0.0, K, t_grid, [](double) { return 0.0; });
    rep.finalize(auto_tol(opts, false, 0.0));
    return rep;
  }
  TransportPlan plan = solve_ot_exact(space, mu0, mu1);
  double budget = 0.0;
  CheckReport rep = cd_rows(e0, e1, plan.cost, K, t_grid, [&](double t) {
    InterpolationResult r = displacement_interpolate(space, plan, t);
    budget = std::max(budget, r.snapped_mass_distance);
    return entropy(space, r.measure);
  });
  rep.discretization_budget = budget;
  rep.notes.push_back("geodesic induced by the returned optimal plan");
  rep.finalize(auto_tol(opts, false, budget));
  if (rep.outcome == CheckOutcome::fail)
    rep.notes.push_back("no certificate found along the computed geodesic (not a disproof)");
  return rep;
}

CheckReport check_cd_gaussian(GaussianReference ref, const GaussianMeasure& g0,
                              const GaussianMeasure& g1, double K, std::span<const double> t_grid,
                              const CheckOptions& opts) {
  const double e0 = gaussian_entropy(g0, ref), e1 = gaussian_entropy(g1, ref);
  const double w2sq = w2_gaussian_sq(g0, g1);
  CheckReport rep = cd_rows(e0, e1, w2sq, K, t_grid, [&](double t) {
    return gaussian_entropy(gaussian_interpolate(g0, g1, t), ref);
  });
  rep.finalize(auto_tol(opts, true, 0.0));
  return rep;
}

namespace {

template <typename EntOf, typename DistSq>
CheckReport bcd_row(const MixtureOmega& omega, double K, const BarycenterResult& bary,
                    EntOf&& ent_of, DistSq&& dist_sq, double lhs) {
  CheckReport rep;
  rep.check = "bcd";
  double mean_ent = 0.0;  // +inf components contaminate the mean, as they should
  bool any_finite = false;
  for (const auto& comp : omega.components) {
    double e = ent_of(comp.measure);
    if (std::isfinite(e)) any_finite = true;
    mean_ent += comp.lambda * e;
  }
  if (!any_finite) {
    rep.outcome = CheckOutcome::vacuous;
    rep.notes.push_back("vacuous: every component entropy is infinite");
    return rep;
  }
  double var_at_bary = 0.0;
  for (const auto& comp : omega.components) var_at_bary += comp.lambda * dist_sq(comp.measure);
  double rhs = mean_ent - 0.5 * K * var_at_bary;
  rep.rows.push_back({"jensen", lhs, rhs, rhs - lhs});
  rep.params = {{"K", K},
                {"var_at_barycenter", var_at_bary},
                {"epsilon_certificate", bary.epsilon},
                {"objective", bary.objective}};
  rep.notes.push_back(
      "RHS uses the sharper integral form int W2^2(bar,mu) dOmega; Var(Omega) <= var_at_barycenter");
  if (!bary.certified) rep.notes.push_back("barycenter epsilon certificate is uncertified");
  return rep;
}

}  // namespace

CheckReport check_jensen_bcd(const GroundSpace& space, const MixtureOmega& omega, double K,
                             const BarycenterResult& bary, const CheckOptions& opts) {
  const auto* nu = std::get_if<DiscreteMeasure>(&bary.measure);
  if (!nu)
    throw PreconditionError("check_jensen_bcd: barycenter must live on the space's atoms");
  CheckReport rep = bcd_row(
      omega, K, bary, [&](const MeasureVariant& m) { return entropy(space, std::get<DiscreteMeasure>(m)); },
      [&](const MeasureVariant& m) {
        double d = w2(space, *nu, std::get<DiscreteMeasure>(m));
        return d * d;
      },
      entropy(space, *nu));
  rep.finalize(auto_tol(opts, false, 0.0));
  return rep;
}

CheckReport check_jensen_bcd_gaussian(GaussianReference ref, const MixtureOmega& omega, double K,
                                      const BarycenterResult& bary, const CheckOptions& opts) {
  const auto* nu = std::get_if<GaussianMeasure>(&bary.measure);
  if (!nu) throw PreconditionError("check_jensen_bcd_gaussian: Gaussian barycenter required");
  CheckReport rep = bcd_row(
      omega, K, bary,
      [&](const MeasureVariant& m) { return gaussian_entropy(std::get<GaussianMeasure>(m), ref); },
      [&](const MeasureVariant& m) { return w2_gaussian_sq(*nu, std::get<GaussianMeasure>(m)); },
      gaussian_entropy(*nu, ref));
  rep.finalize(auto_tol(opts, true, 0.0));
  return rep;
}

namespace {

template <typename EnergyAt, typename DistSqTo>
CheckReport evi_rows(const WassersteinCurve& curve, double e_z, double K, EnergyAt&& energy_at,
                     DistSqTo&& dist_sq_to) {
  CheckReport rep;
  rep.check = "evi";
  rep.params = {{"K", K}, {"samples", double(curve.size())}};
  if (!std::isfinite(e_z)) throw PreconditionError("check_evi_integral: E(z) must be finite");

  const size_t n = curve.size();
  std::vector<double> e(n), dsq(n);
  for (size_t k = 0; k < n; ++k) {
    e[k] = energy_at(k);
    dsq[k] = dist_sq_to(k);
  }
  for (size_t si = 0; si < n; ++si)
    for (size_t ti = si; ti < n; ++ti) {
      if (std::isinf(dsq[si]) || std::isinf(dsq[ti])) {
        ++rep.skipped_rows;
        continue;
      }
      double dt = curve.times[ti] - curve.times[si];
      double lhs = 0.5 * std::exp(K * dt) * dsq[ti] - 0.5 * dsq[si];
      double rhs = i_k(K, dt) * (e_z - e[ti]);
      rep.rows.push_back({fmt_st(curve.times[si], curve.times[ti]), lhs, rhs, rhs - lhs});
    }
  if (rep.skipped_rows > 0)
    rep.notes.push_back("rows with infinite distance to z were skipped and counted");
  rep.notes.push_back("integral EVI verified at sampled time pairs only");
  return rep;
}

}  // namespace

CheckReport check_evi_integral(const GroundSpace& space, const WassersteinCurve& curve,
                               const DiscreteMeasure& z, const EnergySpec& energy, double K,
                               const CheckOptions& opts) {
  curve.validate();
  CheckReport rep = evi_rows(
      curve, energy_of(space, energy, z), K,
      [&](size_t k) { return energy_of(space, energy, std::get<DiscreteMeasure>(curve.measures[k])); },
      [&](size_t k) {
        double d = w2(space, std::get<DiscreteMeasure>(curve.measures[k]), z);
        return d * d;
      });
  rep.finalize(auto_tol(opts, false, 0.0));
  return rep;
}

CheckReport check_evi_integral_gaussian(GaussianReference ref, const WassersteinCurve& curve,
                                        const GaussianMeasure& z, const EnergySpec& energy,
                                        double K, const CheckOptions& opts) {
  curve.validate();
  CheckReport rep = evi_rows(
      curve, energy_of_gaussian(ref, energy, z), K,
      [&](size_t k) {
        return energy_of_gaussian(ref, energy, std::get<GaussianMeasure>(curve.measures[k]));
      },
      [&](size_t k) { return w2_gaussian_sq(std::get<GaussianMeasure>(curve.measures[k]), z); });
  rep.finalize(auto_tol(opts, true, 0.0));
  return rep;
}

namespace {

template <typename EntOf, typename StartDistSq, typename EnergyAt>
CheckReport evi_jensen_rows(const WassersteinCurve& curve, const MixtureOmega& omega, double K,
                            double epsilon, double var_est, EntOf&& ent_of,
                            StartDistSq&& start_dist_sq, EnergyAt&& energy_at) {
  if (epsilon < 0.0) throw PreconditionError("check_evi_jensen_bound: epsilon must be >= 0");
  if (!std::isfinite(var_est))
    throw PreconditionError("check_evi_jensen_bound: a finite Var estimate is required");

  CheckReport rep;
  rep.check = "evi_jensen";
  double s0 = 0.0;
  for (const auto& comp : omega.components) s0 += comp.lambda * start_dist_sq(comp.measure);
  if (s0 > var_est + epsilon + 1e-9)
    throw PreconditionError(
        "check_evi_jensen_bound: curve start violates the nearly-barycenter condition");

  double mean_ent = 0.0;
  for (const auto& comp : omega.components) mean_ent += comp.lambda * ent_of(comp.measure);
  if (!std::isfinite(mean_ent))
    throw PreconditionError("check_evi_jensen_bound: E must be finite on every component");

  rep.params = {{"K", K}, {"epsilon", epsilon}, {"var_est", var_est}, {"start_dispersion", s0}};
  for (size_t k = 0; k < curve.size(); ++k) {
    double t = curve.times[k];
    if (!(t > 0.0)) {
      ++rep.skipped_rows;
      continue;  // the bound is stated for t > 0
    }
    double rhs = mean_ent - 0.5 * K * var_est + epsilon / (2.0 * i_k(K, t));
    double lhs = energy_at(k);
    rep.rows.push_back({fmt_t(t), lhs, rhs, rhs - lhs});
  }
  rep.notes.push_back("start condition verified: sum_j l_j W2^2(y_0, mu_j) <= var_est + epsilon");
  return rep;
}

}  // namespace

CheckReport check_evi_jensen_bound(const GroundSpace& space, const WassersteinCurve& curve,
                                   const MixtureOmega& omega, const EnergySpec& energy, double K,
                                   double epsilon, double var_est, const CheckOptions& opts) {
  curve.validate();
  const auto& y0 = std::get<DiscreteMeasure>(curve.measures.front());
  CheckReport rep = evi_jensen_rows(
      curve, omega, K, epsilon, var_est,
      [&](const MeasureVariant& m) { return energy_of(space, energy, std::get<DiscreteMeasure>(m)); },
      [&](const MeasureVariant& m) {
        double d = w2(space, y0, std::get<DiscreteMeasure>(m));
        return d * d;
      },
      [&](size_t k) { return energy_of(space, energy, std::get<DiscreteMeasure>(curve.measures[k])); });
  rep.finalize(auto_tol(opts, false, 0.0));
  return rep;
}

CheckReport check_evi_jensen_bound_gaussian(GaussianReference ref, const WassersteinCurve& curve,
                                            const MixtureOmega& omega, const EnergySpec& energy,
                                            double K, double epsilon, double var_est,
                                            const CheckOptions& opts) {
  curve.validate();
  const auto& y0 = std::get<GaussianMeasure>(curve.measures.front());
  CheckReport rep = evi_jensen_rows(
      curve, omega, K, epsilon, var_est,
      [&](const MeasureVariant& m) {
        return energy_of_gaussian(ref, energy, std::get<GaussianMeasure>(m));
      },
      [&](const MeasureVariant& m) { return w2_gaussian_sq(y0, std::get<GaussianMeasure>(m)); },
      [&](size_t k) {
        return energy_of_gaussian(ref, energy, std::get<GaussianMeasure>(curve.measures[k]));
      });
  rep.finalize(auto_tol(opts, true, 0.0));
  return rep;
}

CheckReport check_logbm(const GroundSpace& space, std::span<const std::vector<int>> sets,
                        std::span<const double> lambdas, const CheckOptions& opts) {
  if (sets.empty() || sets.size() != lambdas.size())
    throw PreconditionError("check_logbm: sets and lambdas must match and be nonempty");
  double lsum = 0.0;
  for (double l : lambdas) {
    if (!(l > 0.0 && l < 1.0) && sets.size() > 1)
      throw PreconditionError("check_logbm: lambdas must lie in (0,1)");
    lsum += l;
  }
  if (std::fabs(lsum - 1.0) > 1e-12) throw PreconditionError("check_logbm: lambdas must sum to 1");

  const int k = static_cast<int>(sets.size());
  long tuples = 1;
  for (const auto& s : sets) {
    if (s.empty()) throw PreconditionError("check_logbm: empty set");
    tuples *= static_cast<long>(s.size());
    if (tuples > kTupleCap) throw PreconditionError("check_logbm: tuple cap exceeded");
  }

  // measures of the inputs
  std::vector<double> m_in(static_cast<size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    for (int a : sets[static_cast<size_t>(i)]) m_in[static_cast<size_t>(i)] += atom_ref_weight(space, a);
    if (!(m_in[static_cast<size_t>(i)] > 0.0))
      throw PreconditionError("check_logbm: sets must have positive measure");
  }

  const auto* fin = std::get_if<FiniteSpace>(&space);
  const auto* grid = std::get_if<EuclideanGrid>(&space);
  if (!fin && !grid) throw PreconditionError("check_logbm: discrete ground space required");
  const int n_atoms = fin ? fin->n : grid->atom_count();

  std::vector<std::vector<double>> coords;  // grid route
  if (grid)
    for (int i = 0; i < k; ++i) {
      coords.emplace_back(pack_coords(*grid, sets[static_cast<size_t>(i)]));
    }

  double snap_budget = 0.0;
  std::vector<unsigned char> mark(static_cast<size_t>(n_atoms), 0);

  // Tuple sweep; per-thread marks merge by OR, so the result is order-free.
#ifdef _OPENMP
  const int nthreads = omp_get_max_threads();
#else
  const int nthreads = 1;
#endif
  std::vector<std::vector<unsigned char>> marks(static_cast<size_t>(nthreads),
                                                std::vector<unsigned char>(static_cast<size_t>(n_atoms), 0));
  std::vector<double> budgets(static_cast<size_t>(nthreads), 0.0);

#pragma omp parallel for schedule(static)
  for (long t = 0; t < tuples; ++t) {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    long rem = t;
    std::vector<int> tuple(static_cast<size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      long sz = static_cast<long>(sets[static_cast<size_t>(i)].size());
      tuple[static_cast<size_t>(i)] = sets[static_cast<size_t>(i)][static_cast<size_t>(rem % sz)];
      rem /= sz;
    }
    if (fin) {
      PointBarycenter pb = point_barycenter(space, tuple, lambdas);
      for (int a : pb.atoms) marks[static_cast<size_t>(tid)][static_cast<size_t>(a)] = 1;
    } else {
      std::vector<double> avg(static_cast<size_t>(grid->dim), 0.0);
      long rem2 = t;
      for (int i = k - 1; i >= 0; --i) {
        long sz = static_cast<long>(sets[static_cast<size_t>(i)].size());
        const double* x = coords[static_cast<size_t>(i)].data() +
                          static_cast<size_t>(rem2 % sz) * grid->dim;
        for (int d = 0; d < grid->dim; ++d) avg[static_cast<size_t>(d)] += lambdas[static_cast<size_t>(i)] * x[d];
        rem2 /= sz;
      }
      auto [atom, snap] = grid->nearest_atom(avg);
      marks[static_cast<size_t>(tid)][static_cast<size_t>(atom)] = 1;
      budgets[static_cast<size_t>(tid)] = std::max(budgets[static_cast<size_t>(tid)], snap);
    }
  }
  for (int tid = 0; tid < nthreads; ++tid) {
    snap_budget = std::max(snap_budget, budgets[static_cast<size_t>(tid)]);
    for (int a = 0; a < n_atoms; ++a) mark[static_cast<size_t>(a)] |= marks[static_cast<size_t>(tid)][static_cast<size_t>(a)];
  }

  double m_out = 0.0;
  for (int a = 0; a < n_atoms; ++a)
    if (mark[static_cast<size_t>(a)]) m_out += atom_ref_weight(space, a);

  double rhs_product = 1.0;
  for (int i = 0; i < k; ++i) rhs_product *= std::pow(m_in[static_cast<size_t>(i)], lambdas[static_cast<size_t>(i)]);

  CheckReport rep;
  rep.check = "logbm";
  rep.params = {{"tuples", double(tuples)}, {"m_of_E", m_out}, {"product", rhs_product}};
  rep.rows.push_back({"E", rhs_product, m_out, m_out - rhs_product});
  rep.discretization_budget = snap_budget;
  if (grid) rep.notes.push_back("E measured by cell counting of snapped tuple barycenters");
  rep.finalize(auto_tol(opts, fin != nullptr && snap_budget == 0.0, snap_budget));
  return rep;
}

CheckReport check_blaschke_santalo(const GroundSpace& space,
                                   std::span<const std::vector<double>> per_atom_f,
                                   const CheckOptions& opts) {
  const auto* fin = std::get_if<FiniteSpace>(&space);
  const auto* grid = std::get_if<EuclideanGrid>(&space);
  if (!fin && !grid) throw PreconditionError("check_blaschke_santalo: discrete space required");
  const int n_atoms = fin ? fin->n : grid->atom_count();
  const int k = static_cast<int>(per_atom_f.size());
  if (k < 1) throw PreconditionError("check_blaschke_santalo: at least one function");
  for (const auto& f : per_atom_f)
    if (f.size() != static_cast<size_t>(n_atoms))
      throw PreconditionError("check_blaschke_santalo: one value per atom required");

  long tuples = 1;
  for (int i = 0; i < k; ++i) {
    tuples *= n_atoms;
    if (tuples > kTupleCap) throw PreconditionError("check_blaschke_santalo: tuple cap exceeded");
  }

  CheckReport rep;
  rep.check = "bs";
  rep.params = {{"k", double(k)}, {"tuples", double(tuples)}};

  // phase 1: constraint sum f_i(x_i) <= 1/2 inf_x sum d^2(x, x_i), exhaustive
  const std::vector<double> eq(static_cast<size_t>(k), 1.0 / double(k));
  std::string violation;
  for (long t = 0; t < tuples && violation.empty(); ++t) {
    long rem = t;
    std::vector<int> tuple(static_cast<size_t>(k));
    double fsum = 0.0;
    for (int i = k - 1; i >= 0; --i) {
      tuple[static_cast<size_t>(i)] = static_cast<int>(rem % n_atoms);
      rem /= n_atoms;
      fsum += per_atom_f[static_cast<size_t>(i)][static_cast<size_t>(tuple[static_cast<size_t>(i)])];
    }
    PointBarycenter pb = point_barycenter(space, tuple, eq);
    double bound = 0.5 * double(k) * pb.value;  // unweighted sum = k * weighted value
    if (grid) {
      // snapped minimizer may sit above the continuum infimum; pb.value is
      // already the continuum value on grids, so no correction needed
    }
    if (fsum > bound + 1e-12) {
      std::ostringstream os;
      os << "constraint violated at tuple (";
      for (int i = 0; i < k; ++i) os << tuple[static_cast<size_t>(i)] << (i + 1 < k ? "," : ")");
      violation = os.str();
    }
  }
  if (!violation.empty()) {
    rep.outcome = CheckOutcome::constraint_failed;
    rep.notes.push_back(violation);
    rep.finalize(auto_tol(opts, fin != nullptr, 0.0));
    return rep;
  }

  // phase 2
  double product = 1.0;
  for (int i = 0; i < k; ++i) {
    double integral = 0.0;
    for (int a = 0; a < n_atoms; ++a)
      integral += std::exp(per_atom_f[static_cast<size_t>(i)][static_cast<size_t>(a)]) *
                  atom_ref_weight(space, a);
    product *= integral;
  }
  rep.rows.push_back({"product", product, 1.0, 1.0 - product});
  rep.notes.push_back("constraint verified exhaustively over atom tuples");
  rep.finalize(auto_tol(opts, fin != nullptr, 0.0));
  return rep;
}

CheckReport check_blaschke_santalo_gaussian(std::span<const QuadraticF> fs,
                                            const CheckOptions& opts) {
  const int k = static_cast<int>(fs.size());
  if (k < 1) throw PreconditionError("check_blaschke_santalo: at least one function");

  CheckReport rep;
  rep.check = "bs";

  // phase 1: sampled tuple grid on [-6,6]^k
  const int n_samples = (k <= 2) ? 41 : 17;
  std::vector<double> xs(static_cast<size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) xs[static_cast<size_t>(i)] = -6.0 + 12.0 * double(i) / double(n_samples - 1);
  long tuples = 1;
  for (int i = 0; i < k; ++i) tuples *= n_samples;
  rep.params = {{"k", double(k)}, {"constraint_samples", double(tuples)}};

  std::string violation;
  for (long t = 0; t < tuples && violation.empty(); ++t) {
    long rem = t;
    double fsum = 0.0, mean = 0.0;
    std::vector<double> x(static_cast<size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      x[static_cast<size_t>(i)] = xs[static_cast<size_t>(rem % n_samples)];
      rem /= n_samples;
      fsum += fs[static_cast<size_t>(i)](x[static_cast<size_t>(i)]);
      mean += x[static_cast<size_t>(i)] / double(k);
    }
    double inf_sum = 0.0;
    for (int i = 0; i < k; ++i) {
      double diff = x[static_cast<size_t>(i)] - mean;
      inf_sum += diff * diff;
    }
    if (fsum > 0.5 * inf_sum + 1e-12) {
      std::ostringstream os;
      os << "constraint violated at sampled tuple (";
      for (int i = 0; i < k; ++i) os << x[static_cast<size_t>(i)] << (i + 1 < k ? "," : ")");
      violation = os.str();
    }
  }
  if (!violation.empty()) {
    rep.outcome = CheckOutcome::constraint_failed;
    rep.notes.push_back(violation);
    rep.finalize(auto_tol(opts, true, 0.0));
    return rep;
  }

  // phase 2: int e^{a x^2 + b x + c} dgamma = e^{c + b^2/(2(1-2a))} / sqrt(1-2a)
  double product = 1.0;
  for (int i = 0; i < k; ++i) {
    const QuadraticF& f = fs[static_cast<size_t>(i)];
    if (f.a >= 0.5)
      throw PreconditionError("check_blaschke_santalo: e^{f_i} is not gamma-integrable (a >= 1/2)");
    double s = 1.0 - 2.0 * f.a;
    product *= std::exp(f.c + f.b * f.b / (2.0 * s)) / std::sqrt(s);
  }
  rep.rows.push_back({"product", product, 1.0, 1.0 - product});
  rep.notes.push_back("conclusion conditional on the sampled constraint");
  rep.finalize(auto_tol(opts, true, 0.0));
  return rep;
}

}  // namespace otcl
