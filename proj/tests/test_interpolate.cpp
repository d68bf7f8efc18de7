#include <doctest.h>

#include "helpers.hpp"
#include "otcl/interpolate.hpp"

using namespace otcl;
using namespace otcl::testing;

TEST_CASE("endpoints are returned exactly") {
  GroundSpace s = path_space(5);
  auto mu = DiscreteMeasure::uniform(std::vector<int>{0, 2});
  auto nu = DiscreteMeasure::uniform(std::vector<int>{2, 4});
  auto plan = solve_ot_exact(s, mu, nu);
  CHECK(displacement_interpolate(s, plan, 0.0).measure == mu);
  CHECK(displacement_interpolate(s, plan, 1.0).measure == nu);
}

TEST_CASE("midpoint of two diracs on the path space") {
  GroundSpace s = path_space(3);
  auto plan = solve_ot_exact(s, DiscreteMeasure::dirac(0), DiscreteMeasure::dirac(2));
  auto mid = displacement_interpolate(s, plan, 0.5);
  CHECK(mid.measure == DiscreteMeasure::dirac(1));
}

TEST_CASE("missing midpoint is an error, not a silent failure") {
  FiniteSpace f = path_space(3);
  f.midpoints.clear();
  GroundSpace s{f};
  auto plan = solve_ot_exact(s, DiscreteMeasure::dirac(0), DiscreteMeasure::dirac(2));
  CHECK_THROWS_AS(displacement_interpolate(s, plan, 0.5), PreconditionError);
}

TEST_CASE("geodesic property on a midpoint-complete space") {
  GroundSpace s = path_space(17, 0.25);
  auto mu = DiscreteMeasure::uniform(std::vector<int>{0, 16});
  auto nu = DiscreteMeasure::create(std::vector<int>{8, 16}, std::vector<double>{0.75, 0.25});
  auto plan = solve_ot_exact(s, mu, nu);
  double total = w2(s, mu, nu);
  auto grid = uniform_grid(5);  // t in {0, .25, .5, .75, 1}
  auto curve = geodesic_curve(s, plan, grid);
  for (size_t a = 0; a < grid.size(); ++a)
    for (size_t b = a; b < grid.size(); ++b) {
      double d = w2(s, std::get<DiscreteMeasure>(curve.measures[a]),
                    std::get<DiscreteMeasure>(curve.measures[b]));
      CHECK(d == doctest::Approx((grid[b] - grid[a]) * total).epsilon(1e-7));
    }
}

TEST_CASE("mass is conserved at every t") {
  GroundSpace s = path_space(9);
  Rng rng(3);
  auto mu = random_measure(rng, 5, 3);  // atoms 0..4
  std::vector<int> shifted;
  for (int a : mu.support) shifted.push_back(a + 4);
  auto nu = DiscreteMeasure::create(shifted, mu.weights);
  auto plan = solve_ot_exact(s, mu, nu);
  for (double t : {0.25, 0.5, 0.75}) {
    auto r = displacement_interpolate(s, plan, t);
    double total = 0.0;
    for (double w : r.measure.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("grid interpolation snaps and reports the budget") {
  GroundSpace s = grid_1d(0.0, 1.0, 11);  // pitch 0.1
  auto plan = solve_ot_exact(s, DiscreteMeasure::dirac(0), DiscreteMeasure::dirac(10));
  // t = 0.53 lands between atoms; snap distance must be reported <= half pitch
  auto r = displacement_interpolate(s, plan, 0.53);
  CHECK(r.measure.size() == 1);
  CHECK(r.max_snap_distance <= 0.05 + 1e-12);
  CHECK(r.snapped_mass_distance > 0.0);
  CHECK_FALSE(r.snap_exceeded_half_pitch);

  auto exact = displacement_interpolate(s, plan, 0.5);
  CHECK(exact.measure == DiscreteMeasure::dirac(5));
  CHECK(exact.snapped_mass_distance <= 1e-12);
}

TEST_CASE("gaussian interpolation closed forms") {
  auto a = gauss1(0.0, 1.0), b = gauss1(2.0, 1.0);
  auto mid = gaussian_interpolate(a, b, 0.5);
  CHECK(mid.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mid.cov(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  auto c = gauss1(0.0, 9.0);
  auto mid2 = gaussian_interpolate(a, c, 0.5);
  CHECK(mid2.cov(0, 0) == doctest::Approx(4.0).epsilon(1e-12));  // sigma = (1+3)/2

  CHECK(gaussian_interpolate(a, b, 0.0).mean[0] == a.mean[0]);
  CHECK(gaussian_interpolate(a, b, 1.0).mean[0] == b.mean[0]);
}

TEST_CASE("equal-variance interpolation keeps the variance exactly") {
  auto a = gauss1(-1.0, 2.5), b = gauss1(3.0, 2.5);
  auto mid = gaussian_interpolate(a, b, 0.5);
  CHECK(mid.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mid.cov(0, 0) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("gaussian geodesic is metrically linear") {
  auto a = gauss1(0.0, 1.0), b = gauss1(3.0, 4.0);
  double total = w2_gaussian(a, b);
  for (double t : {0.25, 0.5, 0.75}) {
    auto mt = gaussian_interpolate(a, b, t);
    CHECK(w2_gaussian(a, mt) == doctest::Approx(t * total).epsilon(1e-10));
    CHECK(w2_gaussian(mt, b) == doctest::Approx((1 - t) * total).epsilon(1e-10));
  }
}

TEST_CASE("gaussian interpolant tracks the grid interpolant within 2%") {
  GroundSpace s = grid_1d(-8.0, 10.0, 450);
  const auto& g = std::get<EuclideanGrid>(s);
  auto a = discretize_gaussian(g, 0.0, 1.0);
  auto b = discretize_gaussian(g, 2.0, 1.0);
  auto plan = solve_ot_exact(s, a, b);
  auto half = displacement_interpolate(s, plan, 0.5);
  auto closed = gaussian_interpolate(gauss1(0, 1), gauss1(2, 1), 0.5);
  // compare by W2 against the discretized closed form
  auto closed_disc = discretize_gaussian(g, closed.mean[0], std::sqrt(closed.cov(0, 0)));
  CHECK(w2(s, half.measure, closed_disc) <= 0.04);  // 2% of the travelled distance
}

TEST_CASE("2-d bures interpolation stays SPD and hits the endpoints") {
  Matrix c0(2, 2), c1(2, 2);
  c0 << 2.0, 0.3, 0.3, 1.0;
  c1 << 1.0, -0.2, -0.2, 3.0;
  GaussianMeasure a{Vector::Zero(2), c0}, b{Vector::Ones(2), c1};
  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    auto mt = gaussian_interpolate(a, b, t);
    CHECK(is_spd(mt.cov));
  }
  CHECK((gaussian_interpolate(a, b, 1.0).cov - c1).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("curve validation rejects non-increasing times") {
  WassersteinCurve c;
  c.times = {0.0, 0.0};
  c.measures = {MeasureVariant{gauss1(0, 1)}, MeasureVariant{gauss1(1, 1)}};
  CHECK_THROWS_AS(c.validate(), PreconditionError);
}
