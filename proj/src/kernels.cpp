#include "otcl/kernels.hpp"

#include <atomic>
#include <cmath>

namespace otcl::kernels {

namespace {
std::atomic<bool> g_parallel{true};

// Below this many output-defining flops the OpenMP dispatch overhead
// dominates; route to the serial path (same arithmetic, same bits).
constexpr long kParallelFloor = 16384;

inline bool go_parallel(long work) {
  return g_parallel.load(std::memory_order_relaxed) && work >= kParallelFloor;
}

inline double lse_row(int n, const double* g, const double* logb, double eps, long stride_j,
                      const double* Crow) {
  // max-shifted log-sum-exp over the finite entries of one row
  double mx = -kInf;
  for (int j = 0; j < n; ++j) {
    double c = Crow[j * stride_j];
    if (std::isinf(c)) continue;
    double v = (g[j] - c) / eps + logb[j];
    if (v > mx) mx = v;
  }
  if (std::isinf(mx)) return kInf;  // no finite cell in this row
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    double c = Crow[j * stride_j];
    if (std::isinf(c)) continue;
    s += std::exp((g[j] - c) / eps + logb[j] - mx);
  }
  return -eps * (mx + std::log(s));
}
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

void sq_cost_finite_serial(const FiniteSpace& space, std::span<const int> src,
                           std::span<const int> tgt, double* C) {
  const int ns = static_cast<int>(src.size()), nt = static_cast<int>(tgt.size());
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      double d = space.d(src[static_cast<size_t>(i)], tgt[static_cast<size_t>(j)]);
      C[static_cast<long>(i) * nt + j] = d * d;
    }
}

void sq_cost_finite(const FiniteSpace& space, std::span<const int> src, std::span<const int> tgt,
                    double* C) {
  const int ns = static_cast<int>(src.size()), nt = static_cast<int>(tgt.size());
  if (!go_parallel(static_cast<long>(ns) * nt)) return sq_cost_finite_serial(space, src, tgt, C);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      double d = space.d(src[static_cast<size_t>(i)], tgt[static_cast<size_t>(j)]);
      C[static_cast<long>(i) * nt + j] = d * d;
    }
}

void sq_cost_points_serial(std::span<const double> xs, std::span<const double> ys, int dim,
                           double* C) {
  const int ns = static_cast<int>(xs.size()) / dim, nt = static_cast<int>(ys.size()) / dim;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      double s = 0.0;
      for (int d = 0; d < dim; ++d) {
        double diff = xs[static_cast<size_t>(i) * dim + d] - ys[static_cast<size_t>(j) * dim + d];
        s += diff * diff;
      }
      C[static_cast<long>(i) * nt + j] = s;
    }
}

void sq_cost_points(std::span<const double> xs, std::span<const double> ys, int dim, double* C) {
  const int ns = static_cast<int>(xs.size()) / dim, nt = static_cast<int>(ys.size()) / dim;
  if (!go_parallel(static_cast<long>(ns) * nt * dim)) return sq_cost_points_serial(xs, ys, dim, C);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      double s = 0.0;
      for (int d = 0; d < dim; ++d) {
        double diff = xs[static_cast<size_t>(i) * dim + d] - ys[static_cast<size_t>(j) * dim + d];
        s += diff * diff;
      }
      C[static_cast<long>(i) * nt + j] = s;
    }
}

void sinkhorn_row_update_serial(const double* C, int m, int n, const double* g,
                                const double* logb, double eps, double* f) {
  for (int i = 0; i < m; ++i) f[i] = lse_row(n, g, logb, eps, 1, C + static_cast<long>(i) * n);
}

void sinkhorn_row_update(const double* C, int m, int n, const double* g, const double* logb,
                         double eps, double* f) {
  if (!go_parallel(static_cast<long>(m) * n)) return sinkhorn_row_update_serial(C, m, n, g, logb, eps, f);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) f[i] = lse_row(n, g, logb, eps, 1, C + static_cast<long>(i) * n);
}

void sinkhorn_col_update_serial(const double* C, int m, int n, const double* f,
                                const double* loga, double eps, double* g) {
  for (int j = 0; j < n; ++j) g[j] = lse_row(m, f, loga, eps, n, C + j);
}

void sinkhorn_col_update(const double* C, int m, int n, const double* f, const double* loga,
                         double eps, double* g) {
  if (!go_parallel(static_cast<long>(m) * n)) return sinkhorn_col_update_serial(C, m, n, f, loga, eps, g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) g[j] = lse_row(m, f, loga, eps, n, C + j);
}

void matvec_serial(const double* K, int m, int n, const double* x, double* y) {
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    const double* row = K + static_cast<long>(i) * n;
    for (int j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void matvec(const double* K, int m, int n, const double* x, double* y) {
  if (!go_parallel(static_cast<long>(m) * n)) return matvec_serial(K, m, n, x, y);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    const double* row = K + static_cast<long>(i) * n;
    for (int j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void matvec_t_serial(const double* K, int m, int n, const double* x, double* y) {
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += K[static_cast<long>(i) * n + j] * x[i];
    y[j] = s;
  }
}

void matvec_t(const double* K, int m, int n, const double* x, double* y) {
  if (!go_parallel(static_cast<long>(m) * n)) return matvec_t_serial(K, m, n, x, y);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += K[static_cast<long>(i) * n + j] * x[i];
    y[j] = s;
  }
}

void nearest_atoms_serial(const EuclideanGrid& grid, std::span<const double> pts, int npts,
                          int* atom, double* snap) {
  for (int p = 0; p < npts; ++p) {
    auto [a, s] = grid.nearest_atom(pts.subspan(static_cast<size_t>(p) * grid.dim,
                                                static_cast<size_t>(grid.dim)));
    atom[p] = a;
    snap[p] = s;
  }
}

void nearest_atoms(const EuclideanGrid& grid, std::span<const double> pts, int npts, int* atom,
                   double* snap) {
  if (!go_parallel(static_cast<long>(npts) * 8)) return nearest_atoms_serial(grid, pts, npts, atom, snap);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < npts; ++p) {
    auto [a, s] = grid.nearest_atom(pts.subspan(static_cast<size_t>(p) * grid.dim,
                                                static_cast<size_t>(grid.dim)));
    atom[p] = a;
    snap[p] = s;
  }
}

}  // namespace otcl::kernels
