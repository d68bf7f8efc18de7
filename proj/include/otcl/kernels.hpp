#pragma once

#include <span>

#include "otcl/space.hpp"

namespace otcl::kernels {

// Parallel kernels only map elementwise (one thread owns one output cell, no
// cross-element reductions), so they are bit-identical to the serial
// reference at any thread count. Tests compare the two variants exactly.

bool parallel_enabled();
void set_parallel(bool on);

// C[i*nt+j] = d(src[i], tgt[j])^2 over a finite distance matrix.
void sq_cost_finite_serial(const FiniteSpace& space, std::span<const int> src,
                           std::span<const int> tgt, double* C);
void sq_cost_finite(const FiniteSpace& space, std::span<const int> src, std::span<const int> tgt,
                    double* C);

// C[i*nt+j] = |x_i - y_j|^2 for dim-major packed coordinates.
void sq_cost_points_serial(std::span<const double> xs, std::span<const double> ys, int dim,
                           double* C);
void sq_cost_points(std::span<const double> xs, std::span<const double> ys, int dim, double* C);

// Log-domain Sinkhorn half-steps for min <C,pi> + eps KL(pi | a x b):
//   f_i = -eps * LSE_j( (g_j - C_ij)/eps + logb_j ),  entries with C=+inf skipped.
// Each f_i is computed independently.
void sinkhorn_row_update_serial(const double* C, int m, int n, const double* g,
                                const double* logb, double eps, double* f);
void sinkhorn_row_update(const double* C, int m, int n, const double* g, const double* logb,
                         double eps, double* f);
void sinkhorn_col_update_serial(const double* C, int m, int n, const double* f,
                                const double* loga, double eps, double* g);
void sinkhorn_col_update(const double* C, int m, int n, const double* f, const double* loga,
                         double eps, double* g);

// y = K x (row-major m x n) and y = K^T x; per-output-row dot products.
void matvec_serial(const double* K, int m, int n, const double* x, double* y);
void matvec(const double* K, int m, int n, const double* x, double* y);
void matvec_t_serial(const double* K, int m, int n, const double* x, double* y);
void matvec_t(const double* K, int m, int n, const double* x, double* y);

// Snap a batch of points (dim-major, npts of them) to nearest grid atoms.
void nearest_atoms_serial(const EuclideanGrid& grid, std::span<const double> pts, int npts,
                          int* atom, double* snap);
void nearest_atoms(const EuclideanGrid& grid, std::span<const double> pts, int npts, int* atom,
                   double* snap);

}  // namespace otcl::kernels
