// Timing comparison of the OpenMP kernels against their serial reference.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "otcl/common.hpp"
#include "otcl/kernels.hpp"

using namespace otcl;

namespace {

using Clock = std::chrono::steady_clock;

double time_of(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(Clock::now() - t0).count() / reps;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = (argc > 1) ? std::atoi(argv[1]) : 1500;
  const int reps = (argc > 2) ? std::atoi(argv[2]) : 5;
  std::printf("kernel benchmark, %d x %d, %d reps\n", n, n, reps);
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  Rng rng(1);
  std::vector<double> xs(static_cast<size_t>(n)), ys(static_cast<size_t>(n));
  for (auto& v : xs) v = rng.uniform(-5, 5);
  for (auto& v : ys) v = rng.uniform(-5, 5);
  std::vector<double> C(static_cast<size_t>(n) * n);

  row("sq_cost_points",
      time_of([&] { kernels::sq_cost_points_serial(xs, ys, 1, C.data()); }, reps),
      time_of([&] { kernels::sq_cost_points(xs, ys, 1, C.data()); }, reps));

  std::vector<double> f(static_cast<size_t>(n), 0.0), g(static_cast<size_t>(n), 0.0),
      loga(static_cast<size_t>(n), -std::log(double(n))), logb = loga;
  row("sinkhorn_row_update",
      time_of([&] { kernels::sinkhorn_row_update_serial(C.data(), n, n, g.data(), logb.data(),
                                                        0.5, f.data()); },
              reps),
      time_of([&] { kernels::sinkhorn_row_update(C.data(), n, n, g.data(), logb.data(), 0.5,
                                                 f.data()); },
              reps));
  row("sinkhorn_col_update",
      time_of([&] { kernels::sinkhorn_col_update_serial(C.data(), n, n, f.data(), loga.data(),
                                                        0.5, g.data()); },
              reps),
      time_of([&] { kernels::sinkhorn_col_update(C.data(), n, n, f.data(), loga.data(), 0.5,
                                                 g.data()); },
              reps));

  std::vector<double> K(C.size());
  for (size_t e = 0; e < K.size(); ++e) K[e] = std::exp(-C[e]);
  std::vector<double> x(static_cast<size_t>(n), 1.0 / n), y(static_cast<size_t>(n));
  row("matvec",
      time_of([&] { kernels::matvec_serial(K.data(), n, n, x.data(), y.data()); }, reps * 10),
      time_of([&] { kernels::matvec(K.data(), n, n, x.data(), y.data()); }, reps * 10));
  row("matvec_t",
      time_of([&] { kernels::matvec_t_serial(K.data(), n, n, x.data(), y.data()); }, reps * 10),
      time_of([&] { kernels::matvec_t(K.data(), n, n, x.data(), y.data()); }, reps * 10));

  EuclideanGrid grid;
  grid.dim = 1;
  grid.axes.resize(1);
  for (int i = 0; i < n; ++i) grid.axes[0].push_back(-5.0 + 10.0 * i / (n - 1));
  grid.cell_volumes.assign(static_cast<size_t>(n), 10.0 / (n - 1));
  std::vector<double> pts;
  for (int i = 0; i < n * 20; ++i) pts.push_back(rng.uniform(-5, 5));
  std::vector<int> atom(static_cast<size_t>(n) * 20);
  std::vector<double> snap(static_cast<size_t>(n) * 20);
  row("nearest_atoms (20n pts)",
      time_of([&] { kernels::nearest_atoms_serial(grid, pts, n * 20, atom.data(), snap.data()); },
              reps),
      time_of([&] { kernels::nearest_atoms(grid, pts, n * 20, atom.data(), snap.data()); }, reps));

  return 0;
}
