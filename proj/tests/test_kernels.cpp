#include <doctest.h>

#include "helpers.hpp"
#include "otcl/kernels.hpp"

using namespace otcl;
using namespace otcl::testing;

namespace {

struct ParallelGuard {
  explicit ParallelGuard(bool on) { kernels::set_parallel(on); }
  ~ParallelGuard() { kernels::set_parallel(true); }
};

}  // namespace

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  Rng rng(101);
  FiniteSpace f = random_euclidean_finite(rng, 40);
  std::vector<int> src, tgt;
  for (int i = 0; i < 40; i += 2) src.push_back(i);
  for (int i = 1; i < 40; i += 3) tgt.push_back(i);

  std::vector<double> a(src.size() * tgt.size()), b(a.size());
  kernels::sq_cost_finite_serial(f, src, tgt, a.data());
  kernels::sq_cost_finite(f, src, tgt, b.data());
  CHECK(a == b);

  std::vector<double> xs, ys;
  for (int i = 0; i < 30; ++i) xs.push_back(rng.uniform(-3, 3));
  for (int i = 0; i < 20; ++i) ys.push_back(rng.uniform(-3, 3));
  std::vector<double> c(600), d(600);
  kernels::sq_cost_points_serial(xs, ys, 1, c.data());
  kernels::sq_cost_points(xs, ys, 1, d.data());
  CHECK(c == d);
}

TEST_CASE("sinkhorn updates: serial and parallel agree exactly, +inf cells skipped") {
  Rng rng(7);
  const int m = 17, n = 23;
  std::vector<double> C(static_cast<size_t>(m) * n), g(static_cast<size_t>(n)),
      logb(static_cast<size_t>(n)), loga(static_cast<size_t>(m));
  for (auto& v : C) v = rng.uniform(0, 5);
  C[5] = kInf;  // forbidden cell
  for (auto& v : g) v = rng.uniform(-1, 1);
  for (auto& v : logb) v = -std::log(double(n));
  for (auto& v : loga) v = -std::log(double(m));

  std::vector<double> f1(static_cast<size_t>(m)), f2(static_cast<size_t>(m));
  kernels::sinkhorn_row_update_serial(C.data(), m, n, g.data(), logb.data(), 0.3, f1.data());
  kernels::sinkhorn_row_update(C.data(), m, n, g.data(), logb.data(), 0.3, f2.data());
  CHECK(f1 == f2);

  std::vector<double> g1(static_cast<size_t>(n)), g2(static_cast<size_t>(n));
  kernels::sinkhorn_col_update_serial(C.data(), m, n, f1.data(), loga.data(), 0.3, g1.data());
  kernels::sinkhorn_col_update(C.data(), m, n, f1.data(), loga.data(), 0.3, g2.data());
  CHECK(g1 == g2);
}

TEST_CASE("matvec variants agree exactly") {
  Rng rng(13);
  const int m = 31, n = 19;
  std::vector<double> K(static_cast<size_t>(m) * n), x(static_cast<size_t>(n)),
      xt(static_cast<size_t>(m));
  for (auto& v : K) v = rng.next_double();
  for (auto& v : x) v = rng.next_double();
  for (auto& v : xt) v = rng.next_double();
  std::vector<double> y1(static_cast<size_t>(m)), y2(static_cast<size_t>(m));
  kernels::matvec_serial(K.data(), m, n, x.data(), y1.data());
  kernels::matvec(K.data(), m, n, x.data(), y2.data());
  CHECK(y1 == y2);
  std::vector<double> z1(static_cast<size_t>(n)), z2(static_cast<size_t>(n));
  kernels::matvec_t_serial(K.data(), m, n, xt.data(), z1.data());
  kernels::matvec_t(K.data(), m, n, xt.data(), z2.data());
  CHECK(z1 == z2);
}

TEST_CASE("nearest atom snapping: ties resolve to the smaller index") {
  EuclideanGrid g = grid_1d(0.0, 1.0, 11);  // pitch 0.1
  std::vector<double> pts{0.05, 0.1, 0.99, -0.5, 1.5};  // 0.05 is a tie between 0 and 1
  std::vector<int> atom(pts.size());
  std::vector<double> snap(pts.size());
  kernels::nearest_atoms_serial(g, pts, static_cast<int>(pts.size()), atom.data(), snap.data());
  CHECK(atom[0] == 0);  // tie to smaller index
  CHECK(atom[1] == 1);
  CHECK(atom[2] == 10);
  CHECK(atom[3] == 0);  // clamped at the boundary
  CHECK(atom[4] == 10);
  CHECK(snap[0] == doctest::Approx(0.05));

  std::vector<int> atom2(pts.size());
  std::vector<double> snap2(pts.size());
  kernels::nearest_atoms(g, pts, static_cast<int>(pts.size()), atom2.data(), snap2.data());
  CHECK(atom == atom2);
  CHECK(snap == snap2);
}

TEST_CASE("disabling parallelism routes through the serial path") {
  ParallelGuard guard(false);
  CHECK_FALSE(kernels::parallel_enabled());
  EuclideanGrid g = grid_1d(0.0, 1.0, 5);
  std::vector<double> pts{0.3};
  int atom = -1;
  double snap = 0.0;
  kernels::nearest_atoms(g, pts, 1, &atom, &snap);
  CHECK(atom == 1);
}
