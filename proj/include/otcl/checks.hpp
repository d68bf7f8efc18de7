#pragma once

#include <optional>

#include "otcl/barycenter.hpp"
#include "otcl/flows.hpp"
#include "otcl/functionals.hpp"

namespace otcl {

// I_K(t) = int_0^t e^{Kr} dr; (e^{Kt} - 1)/K for K != 0, t for K = 0,
// continuous in K at 0.
double i_k(double K, double t);

struct Modulus {
  double K = 0.0;
};

struct CheckRow {
  std::string witness;  // the t, pair or tuple this row evaluates
  double lhs = 0.0, rhs = 0.0;
  double margin = 0.0;  // rhs - lhs; pass needs min margin >= -tol
};

enum class CheckOutcome { pass, fail, vacuous, constraint_failed };

std::string to_string(CheckOutcome o);

struct CheckReport {
  std::string check;
  std::vector<std::pair<std::string, double>> params;
  double tolerance = kCheckTol;
  std::vector<CheckRow> rows;
  CheckOutcome outcome = CheckOutcome::pass;
  double min_margin = kInf;
  std::string min_witness;
  double discretization_budget = 0.0;
  long skipped_rows = 0;  // infinite-distance rows left out, counted
  std::vector<std::string> notes;

  bool passed() const { return outcome == CheckOutcome::pass; }
  // Computes min margin / witness and pass/fail from the rows.
  void finalize(double tol);
};

struct CheckOptions {
  // NaN = auto: 1e-8 on closed-form subsystems, max(1e-7, 4 * snap budget)
  // on discretized instances.
  double tolerance = std::numeric_limits<double>::quiet_NaN();
};

// --- CD(K,infty): Ent(mu_t) <= (1-t)Ent(mu_0) + t Ent(mu_1) - (K/2)(1-t)t W2^2 ---
CheckReport check_cd(const GroundSpace& space, const DiscreteMeasure& mu0,
                     const DiscreteMeasure& mu1, double K, std::span<const double> t_grid,
                     const CheckOptions& opts = {});
CheckReport check_cd_gaussian(GaussianReference ref, const GaussianMeasure& g0,
                              const GaussianMeasure& g1, double K, std::span<const double> t_grid,
                              const CheckOptions& opts = {});

// --- BCD(K,infty) / Wasserstein Jensen at a supplied barycenter ---
CheckReport check_jensen_bcd(const GroundSpace& space, const MixtureOmega& omega, double K,
                             const BarycenterResult& bary, const CheckOptions& opts = {});
CheckReport check_jensen_bcd_gaussian(GaussianReference ref, const MixtureOmega& omega, double K,
                                      const BarycenterResult& bary, const CheckOptions& opts = {});

// --- integral EVI_K along a sampled curve against a fixed z ---
// margin(s,t) = I_K(t-s)(E(z) - E(y_t)) - e^{K(t-s)}/2 d^2(y_t,z) + 1/2 d^2(y_s,z)
CheckReport check_evi_integral(const GroundSpace& space, const WassersteinCurve& curve,
                               const DiscreteMeasure& z, const EnergySpec& energy, double K,
                               const CheckOptions& opts = {});
CheckReport check_evi_integral_gaussian(GaussianReference ref, const WassersteinCurve& curve,
                                        const GaussianMeasure& z, const EnergySpec& energy,
                                        double K, const CheckOptions& opts = {});

// --- epsilon-approximate Jensen bound along an EVI candidate curve ---
// margin(t) = sum_j l_j E(mu_j) - (K/2) var_est + eps/(2 I_K(t)) - E(y_t);
// the curve start must satisfy sum_j l_j W2^2(y_0, mu_j) <= var_est + eps.
CheckReport check_evi_jensen_bound(const GroundSpace& space, const WassersteinCurve& curve,
                                   const MixtureOmega& omega, const EnergySpec& energy, double K,
                                   double epsilon, double var_est, const CheckOptions& opts = {});
CheckReport check_evi_jensen_bound_gaussian(GaussianReference ref, const WassersteinCurve& curve,
                                            const MixtureOmega& omega, const EnergySpec& energy,
                                            double K, double epsilon, double var_est,
                                            const CheckOptions& opts = {});

// --- multi-marginal log-Brunn-Minkowski: m(E) >= prod m(E_i)^{lambda_i} ---
// E = all barycenters of tuples from E_1 x ... x E_n (exhaustive, capped).
CheckReport check_logbm(const GroundSpace& space, std::span<const std::vector<int>> sets,
                        std::span<const double> lambdas, const CheckOptions& opts = {});

// --- functional Blaschke-Santalo: prod_i int e^{f_i} dm <= 1 under
//     sum f_i(x_i) <= 1/2 inf_x sum d(x, x_i)^2 ---
CheckReport check_blaschke_santalo(const GroundSpace& space,
                                   std::span<const std::vector<double>> per_atom_f,
                                   const CheckOptions& opts = {});

struct QuadraticF {
  double a = 0.0, b = 0.0, c = 0.0;  // f(x) = a x^2 + b x + c
  double operator()(double x) const { return a * x * x + b * x + c; }
};

// Gaussian route, dim 1: constraint verified on a sampled tuple grid (count
// recorded; the conclusion is conditional on it), factors integrate in closed
// form and must be integrable (a < 1/2).
CheckReport check_blaschke_santalo_gaussian(std::span<const QuadraticF> fs,
                                            const CheckOptions& opts = {});

}  // namespace otcl
