#include "otcl/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "otcl/ot.hpp"
#include "otcl/simplex.hpp"

namespace otcl {

MixtureOmega MixtureOmega::create(std::vector<Component> components) {
  if (components.empty()) throw PreconditionError("omega: needs at least one component");
  double sum = 0.0;
  bool any_gauss = false, any_disc = false;
  for (const auto& c : components) {
    if (!(c.lambda > 0.0)) throw PreconditionError("omega: weights must be positive");
    sum += c.lambda;
    (std::holds_alternative<GaussianMeasure>(c.measure) ? any_gauss : any_disc) = true;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw PreconditionError("omega: weights must sum to 1");
  if (any_gauss && any_disc)
    throw PreconditionError("omega: components must all be discrete or all Gaussian");
  MixtureOmega o;
  o.components = std::move(components);
  return o;
}

bool MixtureOmega::gaussian() const {
  return std::holds_alternative<GaussianMeasure>(components.front().measure);
}

double w2_sq_between(const GroundSpace& space, const MeasureVariant& a, const MeasureVariant& b) {
  if (const auto* da = std::get_if<DiscreteMeasure>(&a)) {
    const auto* db = std::get_if<DiscreteMeasure>(&b);
    if (!db) throw PreconditionError("w2_sq_between: mixed measure kinds");
    double d = w2(space, *da, *db);
    return d * d;
  }
  const auto& ga = std::get<GaussianMeasure>(a);
  const auto* gb = std::get_if<GaussianMeasure>(&b);
  if (!gb) throw PreconditionError("w2_sq_between: mixed measure kinds");
  return w2_gaussian_sq(ga, *gb);
}

std::pair<double, size_t> variance_over(const GroundSpace& space, const MixtureOmega& omega,
                                        std::span<const MeasureVariant> candidates) {
  if (candidates.empty()) throw PreconditionError("variance: empty candidate list");
  double best = kInf;
  size_t argmin = 0;
  for (size_t c = 0; c < candidates.size(); ++c) {
    double v = 0.0;
    for (const auto& comp : omega.components) {
      double d2 = w2_sq_between(space, candidates[c], comp.measure);
      if (std::isinf(d2)) {
        v = kInf;
        break;
      }
      v += comp.lambda * d2;
    }
    if (v < best) {
      best = v;
      argmin = c;
    }
  }
  return {best, argmin};
}

namespace {

double objective_of(const GroundSpace& space, const MixtureOmega& omega,
                    const MeasureVariant& nu) {
  double v = 0.0;
  for (const auto& comp : omega.components) v += comp.lambda * w2_sq_between(space, nu, comp.measure);
  return v;
}

}  // namespace

BarycenterResult barycenter_fixed_support(const GroundSpace& space, const MixtureOmega& omega,
                                          std::span<const int> support) {
  if (omega.gaussian())
    throw PreconditionError("barycenter_fixed_support: components must be discrete");
  if (support.empty()) throw PreconditionError("barycenter_fixed_support: empty support");
  std::vector<int> S(support.begin(), support.end());
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  const int ns = static_cast<int>(S.size());
  const int k = static_cast<int>(omega.size());

  // Row layout: [marginal rows per component] then [link rows j*ns + i] then
  // the normalization row. Columns: plan cells per component, then nu.
  int marg_rows = 0;
  std::vector<int> comp_sizes(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    comp_sizes[static_cast<size_t>(j)] =
        static_cast<int>(std::get<DiscreteMeasure>(omega.components[static_cast<size_t>(j)].measure).size());
    marg_rows += comp_sizes[static_cast<size_t>(j)];
  }
  const int link_row0 = marg_rows;
  const int norm_row = marg_rows + k * ns;
  const int n_rows = norm_row + 1;

  std::vector<double> rhs(static_cast<size_t>(n_rows), 0.0);
  std::vector<LpColumn> cols;
  int marg_base = 0;
  for (int j = 0; j < k; ++j) {
    const auto& mu = std::get<DiscreteMeasure>(omega.components[static_cast<size_t>(j)].measure);
    const double lambda = omega.components[static_cast<size_t>(j)].lambda;
    auto C = sq_cost_matrix(space, S, mu.support);
    for (int kk = 0; kk < comp_sizes[static_cast<size_t>(j)]; ++kk)
      rhs[static_cast<size_t>(marg_base + kk)] = mu.weights[static_cast<size_t>(kk)];
    for (int i = 0; i < ns; ++i)
      for (int kk = 0; kk < comp_sizes[static_cast<size_t>(j)]; ++kk) {
        double c = C[static_cast<size_t>(i) * mu.size() + static_cast<size_t>(kk)];
        if (std::isinf(c)) continue;  // forbidden cell, excluded
        LpColumn col;
        col.cost = lambda * c;
        col.entries = {{marg_base + kk, 1.0}, {link_row0 + j * ns + i, 1.0}};
        cols.push_back(std::move(col));
      }
    marg_base += comp_sizes[static_cast<size_t>(j)];
  }
  const size_t nu_col0 = cols.size();
  for (int i = 0; i < ns; ++i) {
    LpColumn col;
    col.cost = 0.0;
    for (int j = 0; j < k; ++j) col.entries.push_back({link_row0 + j * ns + i, -1.0});
    col.entries.push_back({norm_row, 1.0});
    cols.push_back(std::move(col));
  }
  rhs[static_cast<size_t>(norm_row)] = 1.0;

  LpResult lp = solve_lp(rhs, cols);
  if (!lp.feasible)
    throw InfeasibleError("barycenter_fixed_support: a component is unreachable at finite cost");

  std::vector<int> sup;
  std::vector<double> w;
  double total = 0.0;
  for (int i = 0; i < ns; ++i) {
    double v = lp.x[nu_col0 + static_cast<size_t>(i)];
    total += v;
    if (v > kWeightFloor) {
      sup.push_back(S[static_cast<size_t>(i)]);
      w.push_back(v);
    }
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw SolverError("barycenter_fixed_support: LP marginal drifted off 1");
  for (double& v : w) v /= total;

  BarycenterResult res;
  res.measure = DiscreteMeasure::create(sup, w);
  res.objective = lp.objective;
  res.epsilon = 0.0;  // exact over the fixed-support class
  res.pivots = lp.pivots;
  return res;
}

BarycenterResult barycenter_multimarginal(const GroundSpace& space, const MixtureOmega& omega) {
  const auto* grid = std::get_if<EuclideanGrid>(&space);
  if (!grid) throw PreconditionError("barycenter_multimarginal: Euclidean space required");
  if (omega.gaussian())
    throw PreconditionError("barycenter_multimarginal: components must be discrete");
  const int k = static_cast<int>(omega.size());
  const int dim = grid->dim;

  long tuples = 1;
  std::vector<const DiscreteMeasure*> mus;
  std::vector<std::vector<double>> coords;
  std::vector<double> lambdas;
  for (const auto& comp : omega.components) {
    const auto& mu = std::get<DiscreteMeasure>(comp.measure);
    mus.push_back(&mu);
    coords.push_back(pack_coords(*grid, mu.support));
    lambdas.push_back(comp.lambda);
    tuples *= static_cast<long>(mu.size());
    if (tuples > kTupleCap)
      throw PreconditionError("barycenter_multimarginal: product of support sizes exceeds cap");
  }

  // rows: one marginal constraint per component atom
  std::vector<int> row_base(static_cast<size_t>(k));
  int n_rows = 0;
  for (int j = 0; j < k; ++j) {
    row_base[static_cast<size_t>(j)] = n_rows;
    n_rows += static_cast<int>(mus[static_cast<size_t>(j)]->size());
  }
  std::vector<double> rhs(static_cast<size_t>(n_rows));
  for (int j = 0; j < k; ++j)
    for (size_t a = 0; a < mus[static_cast<size_t>(j)]->size(); ++a)
      rhs[static_cast<size_t>(row_base[static_cast<size_t>(j)]) + a] =
          mus[static_cast<size_t>(j)]->weights[a];

  std::vector<LpColumn> cols(static_cast<size_t>(tuples));
  std::vector<int> idx(static_cast<size_t>(k), 0);
  std::vector<double> B(static_cast<size_t>(dim));
  for (long t = 0; t < tuples; ++t) {
    std::fill(B.begin(), B.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      const double* x = coords[static_cast<size_t>(j)].data() +
                        static_cast<size_t>(idx[static_cast<size_t>(j)]) * dim;
      for (int d = 0; d < dim; ++d) B[static_cast<size_t>(d)] += lambdas[static_cast<size_t>(j)] * x[d];
    }
    double cost = 0.0;
    for (int j = 0; j < k; ++j) {
      const double* x = coords[static_cast<size_t>(j)].data() +
                        static_cast<size_t>(idx[static_cast<size_t>(j)]) * dim;
      double s = 0.0;
      for (int d = 0; d < dim; ++d) {
        double diff = x[d] - B[static_cast<size_t>(d)];
        s += diff * diff;
      }
      cost += lambdas[static_cast<size_t>(j)] * s;
    }
    LpColumn& col = cols[static_cast<size_t>(t)];
    col.cost = cost;
    for (int j = 0; j < k; ++j)
      col.entries.push_back({row_base[static_cast<size_t>(j)] + idx[static_cast<size_t>(j)], 1.0});
    // advance the tuple counter (last component fastest)
    for (int j = k - 1; j >= 0; --j) {
      if (++idx[static_cast<size_t>(j)] < static_cast<int>(mus[static_cast<size_t>(j)]->size())) break;
      idx[static_cast<size_t>(j)] = 0;
    }
  }

  LpResult lp = solve_lp(rhs, cols);
  if (!lp.feasible) throw SolverError("barycenter_multimarginal: LP infeasible");

  // push the optimal multi-plan forward under the barycenter map
  std::map<std::vector<double>, double> push;
  std::fill(idx.begin(), idx.end(), 0);
  for (long t = 0; t < tuples; ++t) {
    double wgt = lp.x[static_cast<size_t>(t)];
    if (wgt > kWeightFloor) {
      std::fill(B.begin(), B.end(), 0.0);
      for (int j = 0; j < k; ++j) {
        const double* x = coords[static_cast<size_t>(j)].data() +
                          static_cast<size_t>(idx[static_cast<size_t>(j)]) * dim;
        for (int d = 0; d < dim; ++d)
          B[static_cast<size_t>(d)] += lambdas[static_cast<size_t>(j)] * x[d];
      }
      push[B] += wgt;
    }
    for (int j = k - 1; j >= 0; --j) {
      if (++idx[static_cast<size_t>(j)] < static_cast<int>(mus[static_cast<size_t>(j)]->size())) break;
      idx[static_cast<size_t>(j)] = 0;
    }
  }
  FreePoints fp;
  for (auto& [pt, wgt] : push) {
    fp.points.push_back(pt);
    fp.weights.push_back(wgt);
  }

  BarycenterResult res;
  res.measure = std::move(fp);
  res.objective = lp.objective;
  res.epsilon = 0.0;
  res.pivots = lp.pivots;
  return res;
}

BarycenterResult gaussian_barycenter(const MixtureOmega& omega) {
  if (!omega.gaussian()) throw PreconditionError("gaussian_barycenter: components must be Gaussian");
  const int d = std::get<GaussianMeasure>(omega.components.front().measure).dim();

  Vector mean = Vector::Zero(d);
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& comp : omega.components) {
    const auto& g = std::get<GaussianMeasure>(comp.measure);
    if (g.dim() != d) throw PreconditionError("gaussian_barycenter: dimension mismatch");
    mean += comp.lambda * g.mean;
    cov += comp.lambda * g.cov;  // affine warm start
  }

  BarycenterResult res;
  res.converged = false;
  double residual = kInf;
  for (int it = 0; it < 10000; ++it) {
    Matrix root = spd_sqrt(cov);
    Matrix iroot = spd_inverse_sqrt(cov);
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& comp : omega.components) {
      const auto& g = std::get<GaussianMeasure>(comp.measure);
      acc += comp.lambda * spd_sqrt(root * g.cov * root);
    }
    Matrix next = iroot * acc * acc * iroot;
    next = 0.5 * (next + next.transpose().eval());
    residual = (next - cov).cwiseAbs().maxCoeff();
    cov = std::move(next);
    if (residual < 1e-12) {
      res.converged = true;
      break;
    }
  }

  GaussianMeasure bar = GaussianMeasure::create(mean, cov);
  res.objective = 0.0;
  for (const auto& comp : omega.components)
    res.objective += comp.lambda * w2_gaussian_sq(bar, std::get<GaussianMeasure>(comp.measure));
  res.measure = std::move(bar);
  res.epsilon = res.converged ? 0.0 : residual;
  res.certified = res.converged;
  res.residual = residual;
  return res;
}

BarycenterResult barycenter_sinkhorn(const GroundSpace& space, const MixtureOmega& omega,
                                     std::span<const int> support, double epsilon_reg,
                                     bool certify_with_lp) {
  if (omega.gaussian()) throw PreconditionError("barycenter_sinkhorn: components must be discrete");
  if (!(epsilon_reg > 0.0)) throw PreconditionError("barycenter_sinkhorn: epsilon must be positive");
  if (support.empty()) throw PreconditionError("barycenter_sinkhorn: empty support");
  std::vector<int> S(support.begin(), support.end());
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  const int ns = static_cast<int>(S.size());
  const int k = static_cast<int>(omega.size());

  // log-domain iterative Bregman projections with shared first marginal
  std::vector<std::vector<double>> logK(static_cast<size_t>(k));
  std::vector<std::vector<double>> logu(static_cast<size_t>(k)), logv(static_cast<size_t>(k));
  std::vector<int> nk(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    const auto& mu = std::get<DiscreteMeasure>(omega.components[static_cast<size_t>(j)].measure);
    nk[static_cast<size_t>(j)] = static_cast<int>(mu.size());
    auto C = sq_cost_matrix(space, S, mu.support);
    logK[static_cast<size_t>(j)].resize(C.size());
    for (size_t e = 0; e < C.size(); ++e)
      logK[static_cast<size_t>(j)][e] = std::isinf(C[e]) ? -kInf : -C[e] / epsilon_reg;
    logu[static_cast<size_t>(j)].assign(static_cast<size_t>(ns), 0.0);
    logv[static_cast<size_t>(j)].assign(static_cast<size_t>(nk[static_cast<size_t>(j)]), 0.0);
  }

  auto lse = [](const double* vals, const double* add, int n, int stride) {
    double mx = -kInf;
    for (int i = 0; i < n; ++i) mx = std::max(mx, vals[i * stride] + add[i]);
    if (std::isinf(mx)) return -kInf;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(vals[i * stride] + add[i] - mx);
    return mx + std::log(s);
  };

  std::vector<double> logp(static_cast<size_t>(ns), -std::log(double(ns)));
  std::vector<double> logp_prev;
  std::vector<double> logr(static_cast<size_t>(k) * ns);
  bool converged = false;
  for (long it = 0; it < kSinkhornCap; ++it) {
    for (int j = 0; j < k; ++j) {
      const auto& mu = std::get<DiscreteMeasure>(omega.components[static_cast<size_t>(j)].measure);
      const auto& K = logK[static_cast<size_t>(j)];
      for (int a = 0; a < nk[static_cast<size_t>(j)]; ++a) {
        double m = lse(K.data() + a, logu[static_cast<size_t>(j)].data(), ns,
                       nk[static_cast<size_t>(j)]);
        logv[static_cast<size_t>(j)][static_cast<size_t>(a)] = std::log(mu.weights[static_cast<size_t>(a)]) - m;
      }
      for (int i = 0; i < ns; ++i)
        logr[static_cast<size_t>(j) * ns + static_cast<size_t>(i)] =
            lse(K.data() + static_cast<size_t>(i) * nk[static_cast<size_t>(j)],
                logv[static_cast<size_t>(j)].data(), nk[static_cast<size_t>(j)], 1);
    }
    logp_prev = logp;
    for (int i = 0; i < ns; ++i) {
      double s = 0.0;
      for (int j = 0; j < k; ++j)
        s += omega.components[static_cast<size_t>(j)].lambda *
             (logu[static_cast<size_t>(j)][static_cast<size_t>(i)] +
              logr[static_cast<size_t>(j) * ns + static_cast<size_t>(i)]);
      logp[static_cast<size_t>(i)] = s;
    }
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < ns; ++i)
        logu[static_cast<size_t>(j)][static_cast<size_t>(i)] =
            logp[static_cast<size_t>(i)] - logr[static_cast<size_t>(j) * ns + static_cast<size_t>(i)];
    double delta = 0.0;
    for (int i = 0; i < ns; ++i)
      delta = std::max(delta, std::fabs(logp[static_cast<size_t>(i)] - logp_prev[static_cast<size_t>(i)]));
    if (it > 0 && delta < 1e-12) {
      converged = true;
      break;
    }
  }

  double total = 0.0;
  std::vector<double> w(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i) {
    w[static_cast<size_t>(i)] = std::exp(logp[static_cast<size_t>(i)]);
    total += w[static_cast<size_t>(i)];
  }
  std::vector<int> sup;
  std::vector<double> wn;
  for (int i = 0; i < ns; ++i) {
    double v = w[static_cast<size_t>(i)] / total;
    if (v > kWeightFloor) {
      sup.push_back(S[static_cast<size_t>(i)]);
      wn.push_back(v);
    }
  }

  BarycenterResult res;
  DiscreteMeasure p = DiscreteMeasure::create(sup, wn);
  res.objective = objective_of(space, omega, MeasureVariant{p});
  res.converged = converged;
  if (certify_with_lp) {
    BarycenterResult exact = barycenter_fixed_support(space, omega, S);
    res.epsilon = std::fabs(res.objective - exact.objective);
    res.certified = true;
  } else {
    int max_nk = *std::max_element(nk.begin(), nk.end());
    res.epsilon = epsilon_reg * (std::log(double(ns)) + std::log(double(max_nk)) + 2.0);
    res.certified = false;  // regularization-induced bound only
  }
  res.measure = std::move(p);
  return res;
}

}  // namespace otcl
