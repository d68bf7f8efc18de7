#include <doctest.h>

#include "helpers.hpp"
#include "otcl/checks.hpp"

using namespace otcl;
using namespace otcl::testing;

TEST_CASE("i_k values and limits") {
  CHECK(i_k(0.0, 3.0) == 3.0);
  CHECK(i_k(1.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(i_k(-1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  // continuity in K at 0
  CHECK(i_k(1e-12, 2.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(i_k(1.0, -0.1), PreconditionError);
}

TEST_CASE("i_k is positive and increasing in t") {
  for (double K : {-2.0, 0.0, 1.5}) {
    double prev = 0.0;
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
      double v = i_k(K, t);
      CHECK(v > 0.0);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("cd equality case: translated gaussians wrt lebesgue, K = 0") {
  auto rep = check_cd_gaussian(GaussianReference::lebesgue, gauss1(0, 1), gauss1(2, 1), 0.0,
                               uniform_grid(17));
  CHECK(rep.outcome == CheckOutcome::pass);
  REQUIRE(rep.rows.size() == 17);
  for (const auto& r : rep.rows) CHECK(std::fabs(r.margin) <= 1e-10);
}

TEST_CASE("cd equality case: unit-variance gaussians wrt gamma, K = 1") {
  auto rep = check_cd_gaussian(GaussianReference::standard_gaussian, gauss1(-1, 1), gauss1(1, 1),
                               1.0, uniform_grid(17));
  CHECK(rep.outcome == CheckOutcome::pass);
  for (const auto& r : rep.rows) CHECK(std::fabs(r.margin) <= 1e-10);
}

TEST_CASE("cd margins are monotone in K") {
  auto grid = uniform_grid(9);
  auto strict = check_cd_gaussian(GaussianReference::standard_gaussian, gauss1(-1, 1),
                                  gauss1(1, 2), 1.0, grid);
  auto loose = check_cd_gaussian(GaussianReference::standard_gaussian, gauss1(-1, 1),
                                 gauss1(1, 2), 0.0, grid);
  REQUIRE(strict.rows.size() == loose.rows.size());
  for (size_t i = 0; i < strict.rows.size(); ++i)
    CHECK(loose.rows[i].margin >= strict.rows[i].margin - 1e-12);
}

TEST_CASE("cd on identical measures is identically zero") {
  auto rep = check_cd_gaussian(GaussianReference::standard_gaussian, gauss1(0.5, 2), gauss1(0.5, 2),
                               1.0, uniform_grid(5));
  for (const auto& r : rep.rows) CHECK(std::fabs(r.margin) <= 1e-12);
}

TEST_CASE("discrete cd on a midpoint-complete space") {
  GroundSpace s = path_space(9, 0.5);
  auto mu0 = DiscreteMeasure::uniform(std::vector<int>{0, 4});
  auto mu1 = DiscreteMeasure::uniform(std::vector<int>{4, 8});
  auto rep = check_cd(s, mu0, mu1, 0.0, uniform_grid(5));
  CHECK(rep.outcome == CheckOutcome::pass);  // entropy along the path geodesic is constant here
}

TEST_CASE("vacuous cd is reported, not passed silently") {
  FiniteSpace f = path_space(3);
  f.ref_weights = {1.0, 1.0, 0.0};
  GroundSpace s{f};
  auto rep = check_cd(s, DiscreteMeasure::dirac(2), DiscreteMeasure::dirac(0), 0.0, uniform_grid(5));
  CHECK(rep.outcome == CheckOutcome::vacuous);
}

TEST_CASE("bcd equality case: two unit gaussians wrt gamma at K = 1") {
  auto omega = MixtureOmega::create(
      {{0.5, MeasureVariant{gauss1(-1, 1)}}, {0.5, MeasureVariant{gauss1(1, 1)}}});
  auto bary = gaussian_barycenter(omega);
  const auto& g = std::get<GaussianMeasure>(bary.measure);
  CHECK(g.mean[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g.cov(0, 0) == doctest::Approx(1.0).epsilon(1e-11));
  auto rep = check_jensen_bcd_gaussian(GaussianReference::standard_gaussian, omega, 1.0, bary);
  REQUIRE(rep.rows.size() == 1);
  CHECK(std::fabs(rep.rows[0].margin) <= 1e-8);  // KL = 1/2 each, Var = 1, exact balance
}

TEST_CASE("bcd single-component mixture has zero margin") {
  GroundSpace s = path_space(4);
  Rng rng(5);
  auto mu = random_measure(rng, 4, 2);
  auto omega = MixtureOmega::create({{1.0, MeasureVariant{mu}}});
  auto bary = barycenter_fixed_support(s, omega, all_atoms(s));
  auto rep = check_jensen_bcd(s, omega, 1.0, bary);
  CHECK(std::fabs(rep.rows[0].margin) <= 1e-9);
}

TEST_CASE("two-point bcd reduces to cd at parameter t") {
  GroundSpace s = path_space(9);
  for (double t : {0.25, 0.5, 0.75}) {
    auto mu0 = DiscreteMeasure::uniform(std::vector<int>{0, 4});
    auto mu1 = DiscreteMeasure::uniform(std::vector<int>{4, 8});
    double K = 0.1;
    auto omega =
        MixtureOmega::create({{1.0 - t, MeasureVariant{mu0}}, {t, MeasureVariant{mu1}}});
    auto bary = barycenter_fixed_support(s, omega, all_atoms(s));
    auto bcd = check_jensen_bcd(s, omega, K, bary);
    std::vector<double> just_t{0.0, t, 1.0};
    auto cd = check_cd(s, mu0, mu1, K, just_t);
    CHECK(bcd.rows[0].margin == doctest::Approx(cd.rows[1].margin).epsilon(1e-9));
  }
}

TEST_CASE("evi integral: constant curve at gamma against unit gaussians (talagrand equality)") {
  std::vector<double> times{0.1, 0.3, 0.5, 0.7, 0.9};
  auto curve = gaussian_flow_curve(GaussianMeasure::standard(1),
                                   FlowSpec::Scheme::closed_form_ou, times);
  for (double m : {0.5, 1.0, 2.0}) {
    auto rep = check_evi_integral_gaussian(GaussianReference::standard_gaussian, curve,
                                           gauss1(m, 1.0), EnergySpec::boltzmann(), 1.0);
    CHECK(rep.outcome == CheckOutcome::pass);
    for (const auto& r : rep.rows) CHECK(std::fabs(r.margin) <= 1e-10);
  }
}

TEST_CASE("evi integral along ou flows has nonnegative margins") {
  Rng rng(19);
  std::vector<double> times;
  for (int i = 0; i <= 9; ++i) times.push_back(0.05 + 0.1 * i);
  for (int trial = 0; trial < 10; ++trial) {
    Rng r = rng.split(static_cast<std::uint64_t>(trial));
    auto start = gauss1(r.uniform(-3, 3), r.uniform(0.25, 4.0));
    auto curve = gaussian_flow_curve(start, FlowSpec::Scheme::closed_form_ou, times);
    for (const auto& z : {GaussianMeasure::standard(1), gauss1(1, 1), gauss1(0, 2)}) {
      auto rep = check_evi_integral_gaussian(GaussianReference::standard_gaussian, curve, z,
                                             EnergySpec::boltzmann(), 1.0);
      CHECK(rep.min_margin >= -1e-8);
    }
  }
}

TEST_CASE("evi margins are invariant under time shift") {
  std::vector<double> times{0.1, 0.25, 0.6};
  std::vector<double> shifted{1.1, 1.25, 1.6};
  auto g0 = gauss1(1.5, 0.8);
  // user-supplied curves with identical samples at shifted clocks
  WassersteinCurve a, b;
  for (size_t i = 0; i < times.size(); ++i) {
    auto m = ou_flow_gaussian(g0, times[i]);
    a.times.push_back(times[i]);
    a.measures.emplace_back(m);
    b.times.push_back(shifted[i]);
    b.measures.emplace_back(m);
  }
  auto ra = check_evi_integral_gaussian(GaussianReference::standard_gaussian, a, gauss1(0, 2),
                                        EnergySpec::boltzmann(), 1.0);
  auto rb = check_evi_integral_gaussian(GaussianReference::standard_gaussian, b, gauss1(0, 2),
                                        EnergySpec::boltzmann(), 1.0);
  REQUIRE(ra.rows.size() == rb.rows.size());
  for (size_t i = 0; i < ra.rows.size(); ++i)
    CHECK(ra.rows[i].margin == doctest::Approx(rb.rows[i].margin).epsilon(1e-12));
}

TEST_CASE("evi s = t rows vanish identically") {
  std::vector<double> times{0.2, 0.5};
  auto curve = gaussian_flow_curve(gauss1(2, 1), FlowSpec::Scheme::closed_form_ou, times);
  auto rep = check_evi_integral_gaussian(GaussianReference::standard_gaussian, curve,
                                         gauss1(0, 1), EnergySpec::boltzmann(), 1.0);
  for (const auto& r : rep.rows)
    if (r.witness.find("s=0.2,t=0.2") != std::string::npos ||
        r.witness.find("s=0.5,t=0.5") != std::string::npos)
      CHECK(r.margin == 0.0);
}

TEST_CASE("evi jensen bound: equality instance and the epsilon shift") {
  auto omega = MixtureOmega::create(
      {{0.5, MeasureVariant{gauss1(-1, 1)}}, {0.5, MeasureVariant{gauss1(1, 1)}}});
  auto bary = gaussian_barycenter(omega);
  std::vector<double> times;
  for (int i = 1; i <= 10; ++i) times.push_back(0.1 * i);
  auto curve = gaussian_flow_curve(std::get<GaussianMeasure>(bary.measure),
                                   FlowSpec::Scheme::closed_form_ou, times);
  auto rep0 = check_evi_jensen_bound_gaussian(GaussianReference::standard_gaussian, curve, omega,
                                              EnergySpec::boltzmann(), 1.0, 0.0, bary.objective);
  CHECK(rep0.outcome == CheckOutcome::pass);
  for (const auto& r : rep0.rows) CHECK(std::fabs(r.margin) <= 1e-8);

  for (double eps : {0.1, 1.0}) {
    auto rep = check_evi_jensen_bound_gaussian(GaussianReference::standard_gaussian, curve, omega,
                                               EnergySpec::boltzmann(), 1.0, eps, bary.objective);
    REQUIRE(rep.rows.size() == rep0.rows.size());
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      double shift = eps / (2.0 * i_k(1.0, times[i]));
      CHECK(rep.rows[i].margin - rep0.rows[i].margin == doctest::Approx(shift).epsilon(1e-10));
    }
  }
}

TEST_CASE("evi jensen start condition is enforced") {
  auto omega = MixtureOmega::create(
      {{0.5, MeasureVariant{gauss1(-1, 1)}}, {0.5, MeasureVariant{gauss1(1, 1)}}});
  // start far away violates sum l_j W2^2(y0, mu_j) <= var + eps
  auto curve = gaussian_flow_curve(gauss1(5, 1), FlowSpec::Scheme::closed_form_ou,
                                   std::vector<double>{0.5, 1.0});
  CHECK_THROWS_AS(check_evi_jensen_bound_gaussian(GaussianReference::standard_gaussian, curve,
                                                  omega, EnergySpec::boltzmann(), 1.0, 0.0, 1.0),
                  PreconditionError);
}

TEST_CASE("K = 0 epsilon term is eps/(2t)") {
  CHECK(i_k(0.0, 0.25) == 0.25);  // so eps/(2 I_0(t)) = eps/(2t)
}

TEST_CASE("logbm interval instance: margin 2 - sqrt(3)") {
  // cells of width h tile [0,3]; atoms at the cell centers
  const int cells = 300;
  const double h = 3.0 / cells;
  EuclideanGrid g;
  g.dim = 1;
  g.axes.resize(1);
  for (int i = 0; i < cells; ++i) g.axes[0].push_back(h / 2 + h * i);
  g.cell_volumes.assign(static_cast<size_t>(cells), h);
  GroundSpace s{g};

  std::vector<int> e1, e2;
  for (int i = 0; i < cells; ++i) {
    double x = g.axes[0][static_cast<size_t>(i)];
    if (x < 1.0) e1.push_back(i);
    e2.push_back(i);
  }
  std::vector<std::vector<int>> sets{e1, e2};
  std::vector<double> lambdas{0.5, 0.5};
  auto rep = check_logbm(s, sets, lambdas);
  CHECK(rep.outcome == CheckOutcome::pass);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].margin == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("logbm equality cases") {
  GroundSpace s = path_space(5);
  std::vector<std::vector<int>> same{{1, 2}, {1, 2}};
  std::vector<double> lam{0.3, 0.7};
  auto rep = check_logbm(s, same, lam);
  CHECK(rep.rows[0].margin == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<std::vector<int>> single{{0, 3}};
  std::vector<double> one{1.0};
  auto rep1 = check_logbm(s, single, one);
  CHECK(rep1.rows[0].margin == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("blaschke-santalo equality and strict cases on (R, gamma)") {
  // f1 = f2 = 0: product is 1
  std::vector<QuadraticF> zeros{{0, 0, 0}, {0, 0, 0}};
  auto rep = check_blaschke_santalo_gaussian(zeros);
  CHECK(rep.outcome == CheckOutcome::pass);
  CHECK(rep.rows[0].margin == doctest::Approx(0.0).epsilon(1e-12));

  // f1 = a, f2 = -a: product is still 1
  std::vector<QuadraticF> opp{{0, 0, 0.7}, {0, 0, -0.7}};
  auto rep2 = check_blaschke_santalo_gaussian(opp);
  CHECK(rep2.rows[0].margin == doctest::Approx(0.0).epsilon(1e-12));

  // f_i = -x^2/4: each factor sqrt(2/3), margin 1/3
  std::vector<QuadraticF> quarter{{-0.25, 0, 0}, {-0.25, 0, 0}};
  auto rep3 = check_blaschke_santalo_gaussian(quarter);
  CHECK(rep3.rows[0].margin == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("blaschke-santalo factors match the quadrature oracle") {
  // int e^{-x^2/4} dgamma by Simpson = sqrt(2/3)
  double factor = simpson(
      [](double x) {
        return std::exp(-x * x / 4.0) * std::exp(-x * x / 2.0) / std::sqrt(2.0 * M_PI);
      },
      -12.0, 12.0, 8000);
  CHECK(factor == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-7));
}

TEST_CASE("blaschke-santalo constraint violation is its own outcome") {
  // f1 = f2 = 1 violates sum f_i <= 1/2 inf sum d^2 at x1 = x2
  std::vector<QuadraticF> bad{{0, 0, 1.0}, {0, 0, 1.0}};
  auto rep = check_blaschke_santalo_gaussian(bad);
  CHECK(rep.outcome == CheckOutcome::constraint_failed);

  // non-integrable factor: a >= 1/2 (constant keeps the sampled constraint alive)
  std::vector<QuadraticF> blow{{0.6, 0, -30.0}};
  CHECK_THROWS_AS(check_blaschke_santalo_gaussian(blow), PreconditionError);
}

TEST_CASE("blaschke-santalo on a finite space with f = 0 and probability reference") {
  FiniteSpace f = path_space(3);
  f.ref_weights = {0.25, 0.5, 0.25};
  GroundSpace s{f};
  std::vector<std::vector<double>> fs{{0, 0, 0}, {0, 0, 0}};
  auto rep = check_blaschke_santalo(s, fs);
  CHECK(rep.outcome == CheckOutcome::pass);
  CHECK(rep.rows[0].margin == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("report finalize computes min margin, witness and outcome") {
  CheckReport rep;
  rep.rows.push_back({"t=0.1", 0.0, 1.0, 1.0});
  rep.rows.push_back({"t=0.2", 0.0, -0.5, -0.5});
  rep.finalize(1e-8);
  CHECK(rep.outcome == CheckOutcome::fail);
  CHECK(rep.min_margin == -0.5);
  CHECK(rep.min_witness == "t=0.2");
  rep.outcome = CheckOutcome::pass;
  rep.finalize(0.6);  // widen tolerance: passes
  CHECK(rep.outcome == CheckOutcome::pass);
}

TEST_CASE("cd on a grid widens the tolerance by the snap budget") {
  GroundSpace s = grid_1d(-6.0, 6.0, 241);
  const auto& g = std::get<EuclideanGrid>(s);
  auto mu0 = discretize_gaussian(g, -1.0, 1.0);
  auto mu1 = discretize_gaussian(g, 1.0, 1.0);
  auto rep = check_cd(s, mu0, mu1, 0.0, uniform_grid(9));
  CHECK(rep.discretization_budget > 0.0);
  CHECK(rep.tolerance >= 4.0 * rep.discretization_budget);
  CHECK(rep.outcome == CheckOutcome::pass);  // translation keeps entropy flat
}

TEST_CASE("logbm unions all minimizing atoms on tied finite spaces") {
  // two atoms equidistant from the tuple: both belong to E
  FiniteSpace f;
  f.n = 4;
  // atoms 0 and 1 at mutual distance 2; atoms 2 and 3 both midway
  f.dist = {0, 2, 1, 1,
            2, 0, 1, 1,
            1, 1, 0, 2,
            1, 1, 2, 0};
  f.ref_weights = {1, 1, 1, 1};
  GroundSpace s{f};
  std::vector<std::vector<int>> sets{{0}, {1}};
  std::vector<double> lam{0.5, 0.5};
  auto rep = check_logbm(s, sets, lam);
  // barycenters of (0,1) are both 2 and 3: m(E) = 2, product = 1
  CHECK(rep.rows[0].rhs == doctest::Approx(2.0));
  CHECK(rep.rows[0].margin == doctest::Approx(1.0));
}

TEST_CASE("evi on a discrete space: constant curve at the entropy minimizer") {
  FiniteSpace f = path_space(4);
  f.ref_weights = {0.4, 0.1, 0.3, 0.2};
  GroundSpace s{f};
  auto minimizer = DiscreteMeasure::create(std::vector<int>{0, 1, 2, 3}, f.ref_weights);
  WassersteinCurve curve;
  for (double t : {0.1, 0.4, 0.8}) {
    curve.times.push_back(t);
    curve.measures.emplace_back(minimizer);
  }
  Rng rng(808);
  auto z = random_measure(rng, 4, 3);
  auto rep = check_evi_integral(s, curve, z, EnergySpec::boltzmann(), 0.0);
  CHECK(rep.outcome == CheckOutcome::pass);  // E(z) >= E(min), distances constant
  for (const auto& r : rep.rows)
    if (r.witness.find("s=0.1,t=0.1") != std::string::npos) CHECK(r.margin == 0.0);
}

TEST_CASE("evi jensen bound on a discrete space along a jko curve") {
  GroundSpace s = grid_1d(-3.0, 3.0, 61);
  const auto& g = std::get<EuclideanGrid>(s);
  auto mu = discretize_gaussian(g, 0.5, 0.6);
  auto omega = MixtureOmega::create({{1.0, MeasureVariant{mu}}});
  auto curve = jko_trajectory(s, mu, FlowSpec::jko(EnergySpec::boltzmann(), 0.05, 2));
  // y_0 = mu is an exact barycenter of delta_mu: var_est = 0
  auto rep = check_evi_jensen_bound(s, curve, omega, EnergySpec::boltzmann(), 0.0, 0.0, 0.0);
  CHECK(rep.outcome == CheckOutcome::pass);  // energy only decreases along jko
  CHECK(rep.skipped_rows == 1);              // the t = 0 sample is excluded
}

TEST_CASE("bcd with all component entropies infinite is vacuous") {
  FiniteSpace f = path_space(3);
  f.ref_weights = {1.0, 0.0, 1.0};  // atom 1 is singular
  GroundSpace s{f};
  auto omega = MixtureOmega::create({{1.0, MeasureVariant{DiscreteMeasure::dirac(1)}}});
  BarycenterResult bary;
  bary.measure = DiscreteMeasure::dirac(1);
  bary.objective = 0.0;
  auto rep = check_jensen_bcd(s, omega, 1.0, bary);
  CHECK(rep.outcome == CheckOutcome::vacuous);
}

TEST_CASE("bcd with a mix of finite and infinite component entropies is not vacuous") {
  FiniteSpace f = path_space(3);
  f.ref_weights = {1.0, 0.0, 1.0};  // atom 1 singular
  GroundSpace s{f};
  // first component infinite entropy, second finite: RHS is +inf, row passes trivially
  auto omega = MixtureOmega::create({{0.5, MeasureVariant{DiscreteMeasure::dirac(1)}},
                                     {0.5, MeasureVariant{DiscreteMeasure::dirac(0)}}});
  BarycenterResult bary;
  bary.measure = DiscreteMeasure::dirac(0);
  bary.objective = 0.5;
  auto rep = check_jensen_bcd(s, omega, 0.0, bary);
  CHECK(rep.outcome == CheckOutcome::pass);
  REQUIRE(rep.rows.size() == 1);
  CHECK(std::isinf(rep.rows[0].rhs));
}
