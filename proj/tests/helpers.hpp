#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "otcl/barycenter.hpp"
#include "otcl/measure.hpp"
#include "otcl/ot.hpp"
#include "otcl/space.hpp"

namespace otcl::testing {

// Path-metric finite space: atoms 0..n-1 at coordinates i*step, complete
// midpoint table (every atom strictly between a pair is a geodesic point).
inline FiniteSpace path_space(int n, double step = 1.0) {
  FiniteSpace f;
  f.n = n;
  f.dist.assign(static_cast<size_t>(n) * n, 0.0);
  f.ref_weights.assign(static_cast<size_t>(n), 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.dist[static_cast<size_t>(i) * n + j] = std::fabs(i - j) * step;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int m = i + 1; m < j; ++m)
        f.midpoints.push_back({i, j, m, double(m - i) / double(j - i)});
  return f;
}

inline EuclideanGrid grid_1d(double lo, double hi, int n, bool lebesgue = true) {
  EuclideanGrid g;
  g.dim = 1;
  g.axes.resize(1);
  const double h = (hi - lo) / double(n - 1);
  for (int i = 0; i < n; ++i) g.axes[0].push_back(lo + h * i);
  g.cell_volumes.assign(static_cast<size_t>(n), h);
  if (!lebesgue) g.reference = GaussianRef{Vector::Zero(1), Matrix::Identity(1, 1)};
  return g;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Cell-mass discretization of N(mean, sigma^2) on a 1-D grid (CDF differences
// between cell edges), normalized.
inline DiscreteMeasure discretize_gaussian(const EuclideanGrid& g, double mean, double sigma) {
  const auto& ax = g.axes[0];
  const int n = static_cast<int>(ax.size());
  std::vector<int> support;
  std::vector<double> weights;
  double total = 0.0;
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double lo = (i == 0) ? -1e9 : 0.5 * (ax[static_cast<size_t>(i - 1)] + ax[static_cast<size_t>(i)]);
    double hi = (i + 1 == n) ? 1e9 : 0.5 * (ax[static_cast<size_t>(i)] + ax[static_cast<size_t>(i + 1)]);
    w[static_cast<size_t>(i)] = normal_cdf((hi - mean) / sigma) - normal_cdf((lo - mean) / sigma);
    total += w[static_cast<size_t>(i)];
  }
  for (int i = 0; i < n; ++i) {
    double v = w[static_cast<size_t>(i)] / total;
    if (v > 1e-14) {
      support.push_back(i);
      weights.push_back(v);
    }
  }
  double s = 0.0;
  for (double v : weights) s += v;
  for (double& v : weights) v /= s;
  return DiscreteMeasure::create(support, weights);
}

// Monotone (quantile) coupling cost on the line; the 1-D oracle for d^2.
inline double quantile_coupling_cost(std::span<const double> xs, const DiscreteMeasure& mu,
                                     std::span<const double> ys, const DiscreteMeasure& nu) {
  size_t i = 0, j = 0;
  double a = mu.weights[0], b = nu.weights[0], cost = 0.0;
  while (true) {
    double m = std::min(a, b);
    double diff = xs[i] - ys[j];
    cost += m * diff * diff;
    a -= m;
    b -= m;
    if (a <= 1e-17) {
      if (++i == mu.size()) break;
      a = mu.weights[i];
    }
    if (b <= 1e-17) {
      if (++j == nu.size()) break;
      b = nu.weights[j];
    }
  }
  return cost;
}

inline double quantile_cost_on_space(const GroundSpace& space, const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu) {
  std::vector<double> xs, ys;
  if (const auto* f = std::get_if<FiniteSpace>(&space)) {
    // path-space coordinates are d(0, i)
    for (int a : mu.support) xs.push_back(f->d(0, a));
    for (int a : nu.support) ys.push_back(f->d(0, a));
  } else {
    const auto& g = std::get<EuclideanGrid>(space);
    for (int a : mu.support) xs.push_back(g.atom_coords(a)[0]);
    for (int a : nu.support) ys.push_back(g.atom_coords(a)[0]);
  }
  return quantile_coupling_cost(xs, mu, ys, nu);
}

// Composite Simpson quadrature oracle.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Random valid finite metric: points in R^3 with Euclidean distances.
inline FiniteSpace random_euclidean_finite(Rng& rng, int n, double scale = 1.0) {
  std::vector<std::array<double, 3>> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back({rng.uniform(0.0, scale), rng.uniform(0.0, scale), rng.uniform(0.0, scale)});
  FiniteSpace f;
  f.n = n;
  f.dist.assign(static_cast<size_t>(n) * n, 0.0);
  f.ref_weights.assign(static_cast<size_t>(n), 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int d = 0; d < 3; ++d) {
        double diff = pts[static_cast<size_t>(i)][static_cast<size_t>(d)] -
                      pts[static_cast<size_t>(j)][static_cast<size_t>(d)];
        s += diff * diff;
      }
      f.dist[static_cast<size_t>(i) * n + j] = std::sqrt(s);
    }
  return f;
}

inline DiscreteMeasure random_measure(Rng& rng, int space_atoms, int support_size) {
  std::vector<int> all(static_cast<size_t>(space_atoms));
  for (int i = 0; i < space_atoms; ++i) all[static_cast<size_t>(i)] = i;
  // Fisher-Yates prefix
  for (int i = 0; i < support_size; ++i) {
    int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(space_atoms - i)));
    std::swap(all[static_cast<size_t>(i)], all[static_cast<size_t>(j)]);
  }
  std::vector<int> sup(all.begin(), all.begin() + support_size);
  std::vector<double> w(static_cast<size_t>(support_size));
  double total = 0.0;
  for (double& v : w) {
    v = 0.05 + rng.next_double();
    total += v;
  }
  for (double& v : w) v /= total;
  return DiscreteMeasure::create(sup, w);
}

inline bool measures_close(const DiscreteMeasure& a, const DiscreteMeasure& b,
                           double tol = 1e-9) {
  if (a.support != b.support) return false;
  for (size_t i = 0; i < a.weights.size(); ++i)
    if (std::fabs(a.weights[i] - b.weights[i]) > tol) return false;
  return true;
}

inline GaussianMeasure gauss1(double mean, double var) {
  Vector m(1);
  m << mean;
  Matrix c(1, 1);
  c << var;
  return GaussianMeasure::create(m, c);
}

}  // namespace otcl::testing
