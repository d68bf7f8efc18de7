#include <doctest.h>

#include "helpers.hpp"
#include "otcl/measure.hpp"

using namespace otcl;
using namespace otcl::testing;

TEST_CASE("measure construction sorts, prunes and validates") {
  std::vector<int> sup{3, 1};
  std::vector<double> w{0.25, 0.75};
  auto m = DiscreteMeasure::create(sup, w);
  CHECK(m.support == std::vector<int>{1, 3});
  CHECK(m.weights == std::vector<double>{0.75, 0.25});

  std::vector<int> sup2{0, 1, 2};
  std::vector<double> w2{0.5, 0.5, 1e-16};  // below the floor, pruned
  auto m2 = DiscreteMeasure::create(sup2, w2);
  CHECK(m2.size() == 2);

  std::vector<double> bad{0.4, 0.4, 0.4};
  CHECK_THROWS_AS(DiscreteMeasure::create(sup2, bad), PreconditionError);
  std::vector<int> dup{1, 1};
  std::vector<double> half{0.5, 0.5};
  CHECK_THROWS_AS(DiscreteMeasure::create(dup, half), PreconditionError);
}

TEST_CASE("weight_of sees only the support") {
  auto m = DiscreteMeasure::uniform(std::vector<int>{2, 5});
  CHECK(m.weight_of(2) == doctest::Approx(0.5));
  CHECK(m.weight_of(3) == 0.0);
}

TEST_CASE("gaussian measure requires SPD covariance") {
  Matrix c(2, 2);
  c << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  CHECK_THROWS_AS(GaussianMeasure::create(Vector::Zero(2), c), PreconditionError);
  CHECK_NOTHROW(GaussianMeasure::standard(3));
}

TEST_CASE("measure/space consistency") {
  GroundSpace s = path_space(3);
  auto m = DiscreteMeasure::dirac(5);
  CHECK_THROWS_AS(m.check_space(s), PreconditionError);
}
