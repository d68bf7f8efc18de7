#include "otcl/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "otcl/kernels.hpp"

namespace otcl {

void WassersteinCurve::validate() const {
  if (times.size() != measures.size())
    throw PreconditionError("curve: times and measures differ in length");
  for (size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw PreconditionError("curve: times must strictly increase");
}

namespace {

DiscreteMeasure gather(std::map<int, double>& mass) {
  std::vector<int> support;
  std::vector<double> weights;
  for (auto& [atom, w] : mass) {
    support.push_back(atom);
    weights.push_back(w);
  }
  return DiscreteMeasure::create(support, weights);
}

double min_half_pitch(const EuclideanGrid& g) {
  double h = kInf;
  for (const auto& ax : g.axes)
    for (size_t i = 1; i < ax.size(); ++i) h = std::min(h, 0.5 * (ax[i] - ax[i - 1]));
  return h;
}

}  // namespace

InterpolationResult displacement_interpolate(const GroundSpace& space, const TransportPlan& plan,
                                             double t) {
  if (t < 0.0 || t > 1.0) throw PreconditionError("displacement_interpolate: t outside [0,1]");
  InterpolationResult out;
  if (t == 0.0) {
    out.measure = plan.source;
    return out;
  }
  if (t == 1.0) {
    out.measure = plan.target;
    return out;
  }

  const size_t m = plan.source.size(), n = plan.target.size();

  if (const auto* f = std::get_if<FiniteSpace>(&space)) {
    std::map<int, double> mass;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) {
        double w = plan.at(i, j);
        if (w <= 0.0) continue;
        int a = plan.source.support[i], b = plan.target.support[j];
        if (a == b) {
          mass[a] += w;
          continue;
        }
        auto k = f->midpoint(a, b, t);
        if (!k)
          throw PreconditionError("displacement_interpolate: no midpoint for a plan cell at this t");
        mass[*k] += w;
      }
    out.measure = gather(mass);
    return out;
  }

  if (const auto* g = std::get_if<EuclideanGrid>(&space)) {
    // gather the in-between points of all mass-carrying cells, snap in batch
    std::vector<double> pts;
    std::vector<double> ws;
    auto xs = pack_coords(*g, plan.source.support);
    auto ys = pack_coords(*g, plan.target.support);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) {
        double w = plan.at(i, j);
        if (w <= 0.0) continue;
        for (int d = 0; d < g->dim; ++d)
          pts.push_back((1.0 - t) * xs[i * static_cast<size_t>(g->dim) + static_cast<size_t>(d)] +
                        t * ys[j * static_cast<size_t>(g->dim) + static_cast<size_t>(d)]);
        ws.push_back(w);
      }
    const int npts = static_cast<int>(ws.size());
    std::vector<int> atom(static_cast<size_t>(npts));
    std::vector<double> snap(static_cast<size_t>(npts));
    kernels::nearest_atoms(*g, pts, npts, atom.data(), snap.data());

    std::map<int, double> mass;
    const double half_pitch = min_half_pitch(*g);
    const double pitch_slack = half_pitch * (1.0 + 1e-9) + 1e-12;
    for (int p = 0; p < npts; ++p) {
      mass[atom[static_cast<size_t>(p)]] += ws[static_cast<size_t>(p)];
      out.snapped_mass_distance += ws[static_cast<size_t>(p)] * snap[static_cast<size_t>(p)];
      out.max_snap_distance = std::max(out.max_snap_distance, snap[static_cast<size_t>(p)]);
      if (snap[static_cast<size_t>(p)] > pitch_slack) out.snap_exceeded_half_pitch = true;
    }
    out.measure = gather(mass);
    return out;
  }

  throw PreconditionError("displacement_interpolate: continuum space has no discrete plans");
}

GaussianMeasure gaussian_interpolate(const GaussianMeasure& g0, const GaussianMeasure& g1,
                                     double t) {
  if (g0.dim() != g1.dim()) throw PreconditionError("gaussian_interpolate: dimension mismatch");
  if (t < 0.0 || t > 1.0) throw PreconditionError("gaussian_interpolate: t outside [0,1]");
  const int d = g0.dim();
  Vector mean = (1.0 - t) * g0.mean + t * g1.mean;
  if (d == 1) {
    double s0 = std::sqrt(g0.cov(0, 0)), s1 = std::sqrt(g1.cov(0, 0));
    double st = (1.0 - t) * s0 + t * s1;
    Matrix cov(1, 1);
    cov(0, 0) = st * st;
    return GaussianMeasure{std::move(mean), std::move(cov)};
  }
  // optimal linear map T = S0^{-1/2} (S0^{1/2} S1 S0^{1/2})^{1/2} S0^{-1/2}
  Matrix root0 = spd_sqrt(g0.cov);
  Matrix iroot0 = spd_inverse_sqrt(g0.cov);
  Matrix T = iroot0 * spd_sqrt(root0 * g1.cov * root0) * iroot0;
  Matrix mix = (1.0 - t) * Matrix::Identity(d, d) + t * T;
  Matrix cov = mix * g0.cov * mix;
  cov = 0.5 * (cov + cov.transpose().eval());  // kill symmetry dust
  return GaussianMeasure{std::move(mean), std::move(cov)};
}

WassersteinCurve geodesic_curve(const GroundSpace& space, const TransportPlan& plan,
                                std::span<const double> t_grid, double* snap_budget) {
  WassersteinCurve c;
  c.provenance = WassersteinCurve::Provenance::geodesic;
  double budget = 0.0;
  for (double t : t_grid) {
    auto r = displacement_interpolate(space, plan, t);
    budget = std::max(budget, r.snapped_mass_distance);
    c.times.push_back(t);
    c.measures.emplace_back(std::move(r.measure));
  }
  if (snap_budget) *snap_budget = budget;
  c.validate();
  return c;
}

WassersteinCurve gaussian_geodesic_curve(const GaussianMeasure& g0, const GaussianMeasure& g1,
                                         std::span<const double> t_grid) {
  WassersteinCurve c;
  c.provenance = WassersteinCurve::Provenance::geodesic;
  for (double t : t_grid) {
    c.times.push_back(t);
    c.measures.emplace_back(gaussian_interpolate(g0, g1, t));
  }
  c.validate();
  return c;
}

}  // namespace otcl
