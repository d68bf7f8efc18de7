#include "otcl/space.hpp"

#include <algorithm>
#include <cmath>

namespace otcl {

std::optional<int> FiniteSpace::midpoint(int i, int j, double t, double t_tol) const {
  if (t <= t_tol) return i;
  if (t >= 1.0 - t_tol) return j;
  for (const Midpoint& m : midpoints) {
    if (m.i == i && m.j == j && std::fabs(m.t - t) <= t_tol) return m.k;
    if (m.i == j && m.j == i && std::fabs((1.0 - m.t) - t) <= t_tol) return m.k;
  }
  return std::nullopt;
}

int EuclideanGrid::atom_count() const {
  int n = 1;
  for (const auto& ax : axes) n *= static_cast<int>(ax.size());
  return n;
}

void EuclideanGrid::atom_coords(int idx, double* out) const {
  for (int d = dim - 1; d >= 0; --d) {
    int sz = static_cast<int>(axes[static_cast<size_t>(d)].size());
    out[d] = axes[static_cast<size_t>(d)][static_cast<size_t>(idx % sz)];
    idx /= sz;
  }
}

std::vector<double> EuclideanGrid::atom_coords(int idx) const {
  std::vector<double> out(static_cast<size_t>(dim));
  atom_coords(idx, out.data());
  return out;
}

double EuclideanGrid::ref_weight(int idx) const {
  double w = cell_volumes[static_cast<size_t>(idx)];
  if (const auto* g = std::get_if<GaussianRef>(&reference)) {
    std::vector<double> x(static_cast<size_t>(dim));
    atom_coords(idx, x.data());
    Vector v(dim);
    for (int d = 0; d < dim; ++d) v[d] = x[static_cast<size_t>(d)] - g->mean[d];
    Eigen::LLT<Matrix> llt(g->cov);
    Vector y = llt.solve(v);
    double quad = v.dot(y);
    double logdet = log_det_spd(g->cov);
    double log_density = -0.5 * (dim * std::log(2.0 * M_PI) + logdet + quad);
    w *= std::exp(log_density);
  }
  return w;
}

double EuclideanGrid::sq_dist(int i, int j) const {
  std::vector<double> a(static_cast<size_t>(dim)), b(static_cast<size_t>(dim));
  atom_coords(i, a.data());
  atom_coords(j, b.data());
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    double diff = a[static_cast<size_t>(d)] - b[static_cast<size_t>(d)];
    s += diff * diff;
  }
  return s;
}

double EuclideanGrid::diameter_sq() const {
  double s = 0.0;
  for (const auto& ax : axes) {
    double diff = ax.back() - ax.front();
    s += diff * diff;
  }
  return s;
}

std::pair<int, double> EuclideanGrid::nearest_atom(std::span<const double> point) const {
  int idx = 0;
  double snap_sq = 0.0;
  for (int d = 0; d < dim; ++d) {
    const auto& ax = axes[static_cast<size_t>(d)];
    double x = point[static_cast<size_t>(d)];
    auto it = std::lower_bound(ax.begin(), ax.end(), x);
    int hi = static_cast<int>(it - ax.begin());
    int best;
    if (hi == 0) {
      best = 0;
    } else if (hi == static_cast<int>(ax.size())) {
      best = static_cast<int>(ax.size()) - 1;
    } else {
      int lo = hi - 1;
      double dl = x - ax[static_cast<size_t>(lo)];
      double dh = ax[static_cast<size_t>(hi)] - x;
      best = (dl <= dh) ? lo : hi;  // ties to the smaller index
    }
    double diff = x - ax[static_cast<size_t>(best)];
    snap_sq += diff * diff;
    idx = idx * static_cast<int>(ax.size()) + best;
  }
  return {idx, std::sqrt(snap_sq)};
}

namespace {

void validate_finite(const FiniteSpace& s, bool force_triangle, ValidationReport& rep) {
  const int n = s.n;
  if (n <= 0 || s.dist.size() != static_cast<size_t>(n) * n) {
    rep.violations.push_back({"shape", {}, "dist must be n*n with n > 0"});
    return;
  }
  if (s.ref_weights.size() != static_cast<size_t>(n)) {
    rep.violations.push_back({"shape", {}, "ref_weights must have n entries"});
    return;
  }
  for (int i = 0; i < n; ++i) {
    if (s.d(i, i) != 0.0)
      rep.violations.push_back({"diagonal", {i}, "d(i,i) must be 0"});
    for (int j = i + 1; j < n; ++j) {
      if (s.d(i, j) != s.d(j, i))
        rep.violations.push_back({"symmetry", {i, j}, "d(i,j) != d(j,i)"});
      if (!(s.d(i, j) > 0.0))
        rep.violations.push_back({"positivity", {i, j}, "off-diagonal distance must be > 0"});
    }
  }
  bool any_positive = false;
  for (int i = 0; i < n; ++i) {
    double w = s.ref_weights[static_cast<size_t>(i)];
    if (w < 0.0) rep.violations.push_back({"ref_weights", {i}, "negative reference weight"});
    if (w > 0.0) any_positive = true;
  }
  if (!any_positive)
    rep.violations.push_back({"ref_weights", {}, "reference measure is identically zero"});

  for (size_t e = 0; e < s.midpoints.size(); ++e) {
    const auto& m = s.midpoints[e];
    if (m.i < 0 || m.i >= n || m.j < 0 || m.j >= n || m.k < 0 || m.k >= n ||
        !(m.t > 0.0 && m.t < 1.0)) {
      rep.violations.push_back({"midpoints", {static_cast<int>(e)}, "entry out of range"});
      continue;
    }
    double dij = s.d(m.i, m.j);
    if (std::isinf(dij)) {
      rep.violations.push_back({"midpoints", {static_cast<int>(e)}, "geodesic across +inf"});
      continue;
    }
    if (std::fabs(s.d(m.i, m.k) - m.t * dij) > 1e-12 * (1.0 + dij) ||
        std::fabs(s.d(m.k, m.j) - (1.0 - m.t) * dij) > 1e-12 * (1.0 + dij))
      rep.violations.push_back(
          {"midpoints", {m.i, m.j, m.k}, "point is not at parameter t of a geodesic"});
  }

  if (n > kTriangleGate && !force_triangle) {
    rep.triangle_checked = false;
    return;
  }
  // d(i,k) <= d(i,j) + d(j,k); +inf on the right always satisfies it.
  constexpr double tol = 1e-12;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dij = s.d(i, j);
      if (std::isinf(dij)) continue;
      for (int k = 0; k < n; ++k) {
        double djk = s.d(j, k);
        if (std::isinf(djk)) continue;
        if (s.d(i, k) > dij + djk + tol)
          rep.violations.push_back({"triangle", {i, j, k}, "d(i,k) > d(i,j) + d(j,k)"});
      }
    }
}

void validate_grid(const EuclideanGrid& g, ValidationReport& rep) {
  if (g.dim <= 0 || g.axes.size() != static_cast<size_t>(g.dim)) {
    rep.violations.push_back({"shape", {}, "dim must match axes"});
    return;
  }
  for (int d = 0; d < g.dim; ++d) {
    const auto& ax = g.axes[static_cast<size_t>(d)];
    if (ax.empty()) {
      rep.violations.push_back({"axes", {d}, "empty axis"});
      continue;
    }
    for (size_t i = 1; i < ax.size(); ++i)
      if (!(ax[i] > ax[i - 1]))
        rep.violations.push_back({"axes", {d, static_cast<int>(i)}, "axis not strictly increasing"});
  }
  if (g.cell_volumes.size() != static_cast<size_t>(g.atom_count())) {
    rep.violations.push_back({"cell_volumes", {}, "one volume per atom required"});
  } else {
    for (size_t i = 0; i < g.cell_volumes.size(); ++i)
      if (!(g.cell_volumes[i] > 0.0))
        rep.violations.push_back({"cell_volumes", {static_cast<int>(i)}, "cell volume must be > 0"});
  }
  if (const auto* gr = std::get_if<GaussianRef>(&g.reference)) {
    if (gr->mean.size() != g.dim || gr->cov.rows() != g.dim || gr->cov.cols() != g.dim)
      rep.violations.push_back({"reference", {}, "gaussian reference shape mismatch"});
    else if (!is_spd(gr->cov))
      rep.violations.push_back({"reference", {}, "gaussian covariance is not SPD"});
  }
}

}  // namespace

ValidationReport validate_space(const GroundSpace& space, bool force_triangle) {
  ValidationReport rep;
  if (const auto* f = std::get_if<FiniteSpace>(&space)) {
    validate_finite(*f, force_triangle, rep);
  } else if (const auto* g = std::get_if<EuclideanGrid>(&space)) {
    validate_grid(*g, rep);
  } else {
    const auto& a = std::get<GaussianAnalytic>(space);
    if (a.dim <= 0) rep.violations.push_back({"dim", {}, "dimension must be positive"});
  }
  return rep;
}

namespace {

void check_weights(std::span<const int> points, std::span<const double> lambdas) {
  if (points.empty()) throw PreconditionError("point_barycenter: empty point list");
  if (points.size() != lambdas.size())
    throw PreconditionError("point_barycenter: points and weights differ in length");
  double sum = 0.0;
  for (double l : lambdas) {
    if (l < 0.0) throw PreconditionError("point_barycenter: negative weight");
    sum += l;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw PreconditionError("point_barycenter: weights must sum to 1");
}

}  // namespace

PointBarycenter point_barycenter(const GroundSpace& space, std::span<const int> points,
                                 std::span<const double> lambdas) {
  check_weights(points, lambdas);
  PointBarycenter out;

  if (const auto* f = std::get_if<FiniteSpace>(&space)) {
    out.value = kInf;
    for (int z = 0; z < f->n; ++z) {
      double v = 0.0;
      for (size_t p = 0; p < points.size(); ++p) {
        double dd = f->d(z, points[p]);
        if (std::isinf(dd)) {
          if (lambdas[p] > 0.0) {
            v = kInf;
            break;
          }
          continue;  // zero weight never moves mass across an infinite distance
        }
        v += lambdas[p] * dd * dd;
      }
      if (v < out.value - 1e-15) {
        out.value = v;
        out.atoms = {z};
      } else if (std::isfinite(v) && std::fabs(v - out.value) <= 1e-15) {
        out.atoms.push_back(z);
      }
    }
    if (std::isinf(out.value)) {
      out.atoms.clear();
      out.finite = false;
    }
    return out;
  }

  if (const auto* g = std::get_if<EuclideanGrid>(&space)) {
    std::vector<double> mean(static_cast<size_t>(g->dim), 0.0);
    std::vector<double> x(static_cast<size_t>(g->dim));
    for (size_t p = 0; p < points.size(); ++p) {
      g->atom_coords(points[p], x.data());
      for (int d = 0; d < g->dim; ++d) mean[static_cast<size_t>(d)] += lambdas[p] * x[static_cast<size_t>(d)];
    }
    double v = 0.0;
    for (size_t p = 0; p < points.size(); ++p) {
      g->atom_coords(points[p], x.data());
      double s = 0.0;
      for (int d = 0; d < g->dim; ++d) {
        double diff = x[static_cast<size_t>(d)] - mean[static_cast<size_t>(d)];
        s += diff * diff;
      }
      v += lambdas[p] * s;
    }
    auto [idx, snap] = g->nearest_atom(mean);
    out.point = mean;
    out.value = v;
    out.atoms = {idx};
    out.snap_distance = snap;
    return out;
  }

  throw PreconditionError(
      "point_barycenter: GaussianAnalytic has no atoms; use point_barycenter_euclidean");
}

std::vector<int> all_atoms(const GroundSpace& space) {
  int n = 0;
  if (const auto* f = std::get_if<FiniteSpace>(&space))
    n = f->n;
  else if (const auto* g = std::get_if<EuclideanGrid>(&space))
    n = g->atom_count();
  else
    throw PreconditionError("all_atoms: GaussianAnalytic has no atoms");
  std::vector<int> atoms(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) atoms[static_cast<size_t>(i)] = i;
  return atoms;
}

std::vector<int> reference_support(const GroundSpace& space) {
  std::vector<int> F;
  if (const auto* f = std::get_if<FiniteSpace>(&space)) {
    for (int i = 0; i < f->n; ++i)
      if (f->ref_weights[static_cast<size_t>(i)] > 0.0) F.push_back(i);
  } else if (const auto* g = std::get_if<EuclideanGrid>(&space)) {
    const int n = g->atom_count();
    for (int i = 0; i < n; ++i)
      if (g->ref_weight(i) > 0.0) F.push_back(i);
  } else {
    throw PreconditionError("reference_support: GaussianAnalytic has no atoms");
  }
  return F;
}

PointBarycenter point_barycenter_euclidean(std::span<const std::vector<double>> points,
                                           std::span<const double> lambdas) {
  if (points.empty()) throw PreconditionError("point_barycenter: empty point list");
  if (points.size() != lambdas.size())
    throw PreconditionError("point_barycenter: points and weights differ in length");
  double sum = 0.0;
  for (double l : lambdas) {
    if (l < 0.0) throw PreconditionError("point_barycenter: negative weight");
    sum += l;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw PreconditionError("point_barycenter: weights must sum to 1");

  const size_t dim = points[0].size();
  PointBarycenter out;
  out.point.assign(dim, 0.0);
  for (size_t p = 0; p < points.size(); ++p) {
    if (points[p].size() != dim) throw PreconditionError("point_barycenter: dimension mismatch");
    for (size_t d = 0; d < dim; ++d) out.point[d] += lambdas[p] * points[p][d];
  }
  out.value = 0.0;
  for (size_t p = 0; p < points.size(); ++p) {
    double s = 0.0;
    for (size_t d = 0; d < dim; ++d) {
      double diff = points[p][d] - out.point[d];
      s += diff * diff;
    }
    out.value += lambdas[p] * s;
  }
  return out;
}

}  // namespace otcl
