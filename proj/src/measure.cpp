#include "otcl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace otcl {

DiscreteMeasure DiscreteMeasure::create(std::span<const int> support,
                                        std::span<const double> weights) {
  if (support.size() != weights.size())
    throw PreconditionError("measure: support and weights differ in length");
  if (support.empty()) throw PreconditionError("measure: empty support");

  std::vector<size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return support[a] < support[b]; });

  DiscreteMeasure m;
  double sum = 0.0;
  for (size_t k : order) {
    double w = weights[k];
    if (w < 0.0) throw PreconditionError("measure: negative weight");
    sum += w;
    if (w < kWeightFloor) continue;  // 0*ln 0 = 0 downstream
    if (!m.support.empty() && m.support.back() == support[k])
      throw PreconditionError("measure: duplicate support atom");
    m.support.push_back(support[k]);
    m.weights.push_back(w);
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw PreconditionError("measure: weights must sum to 1");
  if (m.support.empty()) throw PreconditionError("measure: all weights below the floor");
  return m;
}

DiscreteMeasure DiscreteMeasure::dirac(int atom) {
  DiscreteMeasure m;
  m.support = {atom};
  m.weights = {1.0};
  return m;
}

DiscreteMeasure DiscreteMeasure::uniform(std::span<const int> atoms) {
  std::vector<double> w(atoms.size(), 1.0 / double(atoms.size()));
  return create(atoms, w);
}

double DiscreteMeasure::weight_of(int a) const {
  auto it = std::lower_bound(support.begin(), support.end(), a);
  if (it == support.end() || *it != a) return 0.0;
  return weights[static_cast<size_t>(it - support.begin())];
}

void DiscreteMeasure::check_space(const FiniteSpace& s) const {
  for (int a : support)
    if (a < 0 || a >= s.n) throw PreconditionError("measure: support atom outside the space");
}

void DiscreteMeasure::check_space(const EuclideanGrid& g) const {
  const int n = g.atom_count();
  for (int a : support)
    if (a < 0 || a >= n) throw PreconditionError("measure: support atom outside the space");
}

void DiscreteMeasure::check_space(const GroundSpace& s) const {
  if (const auto* f = std::get_if<FiniteSpace>(&s))
    check_space(*f);
  else if (const auto* g = std::get_if<EuclideanGrid>(&s))
    check_space(*g);
  else
    throw PreconditionError("measure: discrete measures do not live on GaussianAnalytic");
}

GaussianMeasure GaussianMeasure::create(Vector mean, Matrix cov) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw PreconditionError("gaussian: covariance shape mismatch");
  if (!is_symmetric(cov)) throw PreconditionError("gaussian: covariance not symmetric");
  if (!is_spd(cov)) throw PreconditionError("gaussian: covariance not positive definite");
  return GaussianMeasure{std::move(mean), std::move(cov)};
}

GaussianMeasure GaussianMeasure::standard(int dim) {
  return GaussianMeasure{Vector::Zero(dim), Matrix::Identity(dim, dim)};
}

double TransportPlan::marginal_violation() const {
  const size_t m = source.size(), n = target.size();
  double worst = 0.0;
  for (size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (size_t j = 0; j < n; ++j) row += matrix[i * n + j];
    worst = std::max(worst, std::fabs(row - source.weights[i]));
  }
  for (size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (size_t i = 0; i < m; ++i) col += matrix[i * n + j];
    worst = std::max(worst, std::fabs(col - target.weights[j]));
  }
  return worst;
}

}  // namespace otcl
