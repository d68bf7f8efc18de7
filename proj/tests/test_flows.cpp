#include <doctest.h>

#include "helpers.hpp"
#include "otcl/flows.hpp"
#include "otcl/functionals.hpp"

using namespace otcl;
using namespace otcl::testing;

TEST_CASE("heat flow closed form") {
  auto g = gauss1(0.3, 1.0);
  CHECK(heat_flow_gaussian(g, 0.0).cov(0, 0) == 1.0);
  CHECK(heat_flow_gaussian(g, 0.5).cov(0, 0) == doctest::Approx(2.0));
  CHECK(heat_flow_gaussian(g, 0.5).mean[0] == doctest::Approx(0.3));  // means constant
}

TEST_CASE("ou flow closed form and its fixed point") {
  auto g = gauss1(2.0, 1.0);
  auto at = ou_flow_gaussian(g, 1.0);
  CHECK(at.mean[0] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(at.cov(0, 0) == doctest::Approx(1.0).epsilon(1e-14));  // unit variance is invariant

  auto gamma = GaussianMeasure::standard(1);
  for (double t : {0.1, 1.0, 10.0}) {
    auto moved = ou_flow_gaussian(gamma, t);
    CHECK(moved.mean[0] == 0.0);
    CHECK(moved.cov(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  // long-time limit is gamma
  auto far = ou_flow_gaussian(gauss1(-3.0, 5.0), 40.0);
  CHECK(std::fabs(far.mean[0]) <= 1e-12);
  CHECK(far.cov(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed-form flows satisfy the semigroup property") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Rng r = rng.split(static_cast<std::uint64_t>(trial));
    auto g = gauss1(r.uniform(-2, 2), r.uniform(0.3, 3.0));
    double s = r.uniform(0.0, 1.0), t = r.uniform(0.0, 1.0);
    auto heat2 = heat_flow_gaussian(heat_flow_gaussian(g, s), t);
    auto heat1 = heat_flow_gaussian(g, s + t);
    CHECK(heat2.cov(0, 0) == doctest::Approx(heat1.cov(0, 0)).epsilon(1e-12));
    auto ou2 = ou_flow_gaussian(ou_flow_gaussian(g, s), t);
    auto ou1 = ou_flow_gaussian(g, s + t);
    CHECK(ou2.mean[0] == doctest::Approx(ou1.mean[0]).epsilon(1e-12));
    CHECK(ou2.cov(0, 0) == doctest::Approx(ou1.cov(0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("jko fixed point: the normalized reference stays put") {
  FiniteSpace f = path_space(5);
  f.ref_weights = {0.1, 0.2, 0.4, 0.2, 0.1};
  GroundSpace s{f};
  auto mu = DiscreteMeasure::create(std::vector<int>{0, 1, 2, 3, 4}, f.ref_weights);
  auto step = jko_step(s, mu, 0.05, EnergySpec::boltzmann());
  CHECK(step.measure == mu);  // entropy minimizer is a fixed point
  CHECK(step.objective == doctest::Approx(entropy(s, mu)).epsilon(1e-12));
}

TEST_CASE("jko step never increases the objective or the energy") {
  GroundSpace s = grid_1d(-2.0, 2.0, 41);
  const auto& g = std::get<EuclideanGrid>(s);
  auto mu = discretize_gaussian(g, 0.5, 0.4);
  auto energy = EnergySpec::boltzmann();
  double e_mu = entropy(s, mu);
  auto step = jko_step(s, mu, 0.01, energy);
  CHECK(step.energy <= e_mu + 1e-9);
  CHECK(step.objective <= e_mu + 1e-12);  // objective at mu equals its energy
}

TEST_CASE("grid jko step tracks the heat flow") {
  GroundSpace s = grid_1d(-6.0, 6.0, 121);
  const auto& g = std::get<EuclideanGrid>(s);
  auto mu = discretize_gaussian(g, 0.0, 1.0);
  auto step = jko_step(s, mu, 0.01, EnergySpec::boltzmann());
  // one implicit Euler step of the heat flow: N(0, 1.02)
  auto target = discretize_gaussian(g, 0.0, std::sqrt(1.02));
  CHECK(w2(s, step.measure, target) <= 0.05);
}

TEST_CASE("jko trajectory timestamps and energy monotonicity") {
  GroundSpace s = grid_1d(-4.0, 4.0, 61);
  const auto& g = std::get<EuclideanGrid>(s);
  auto mu = discretize_gaussian(g, 0.3, 0.7);
  auto spec = FlowSpec::jko(EnergySpec::boltzmann(), 0.02, 3);
  auto curve = jko_trajectory(s, mu, spec);
  REQUIRE(curve.size() == 4);
  CHECK(curve.times[0] == 0.0);
  CHECK(curve.times[3] == doctest::Approx(0.06));
  double prev = kInf;
  for (const auto& m : curve.measures) {
    double e = entropy(s, std::get<DiscreteMeasure>(m));
    CHECK(e <= prev + 1e-9);
    prev = e;
  }
}

TEST_CASE("jko with a potential energy drifts downhill") {
  // linear potential on a line pushes mass toward smaller f
  GroundSpace s = grid_1d(0.0, 1.0, 21);
  const auto& g = std::get<EuclideanGrid>(s);
  std::vector<double> f(21);
  for (int a = 0; a < 21; ++a) f[static_cast<size_t>(a)] = g.atom_coords(a)[0];  // f(x) = x
  auto energy = EnergySpec::potential_energy(f);
  auto mu = DiscreteMeasure::uniform(all_atoms(s));
  auto step = jko_step(s, mu, 0.05, energy);
  CHECK(potential_energy(step.measure, f) < potential_energy(mu, f) - 1e-6);
}

TEST_CASE("jko precondition: energy must be finite at the start") {
  FiniteSpace f = path_space(3);
  f.ref_weights = {1.0, 0.0, 1.0};
  GroundSpace s{f};
  auto mu = DiscreteMeasure::uniform(std::vector<int>{0, 1});  // singular at atom 1
  CHECK_THROWS_AS(jko_step(s, mu, 0.1, EnergySpec::boltzmann()), PreconditionError);
}

TEST_CASE("flow curves validate and carry provenance") {
  auto curve = gaussian_flow_curve(gauss1(1, 1), FlowSpec::Scheme::closed_form_ou,
                                   std::vector<double>{0.1, 0.2, 0.4});
  CHECK(curve.provenance == WassersteinCurve::Provenance::flow);
  CHECK(curve.size() == 3);
}
