#include "otcl/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otcl/kernels.hpp"
#include "otcl/transport_simplex.hpp"

namespace otcl {

std::vector<double> pack_coords(const EuclideanGrid& grid, std::span<const int> support) {
  std::vector<double> out(support.size() * static_cast<size_t>(grid.dim));
  for (size_t k = 0; k < support.size(); ++k)
    grid.atom_coords(support[k], out.data() + k * static_cast<size_t>(grid.dim));
  return out;
}

std::vector<double> sq_cost_matrix(const GroundSpace& space, std::span<const int> src,
                                   std::span<const int> tgt) {
  std::vector<double> C(src.size() * tgt.size());
  if (const auto* f = std::get_if<FiniteSpace>(&space)) {
    kernels::sq_cost_finite(*f, src, tgt, C.data());
  } else if (const auto* g = std::get_if<EuclideanGrid>(&space)) {
    auto xs = pack_coords(*g, src);
    auto ys = pack_coords(*g, tgt);
    kernels::sq_cost_points(xs, ys, g->dim, C.data());
  } else {
    throw PreconditionError("sq_cost_matrix: GaussianAnalytic has no atoms");
  }
  return C;
}

namespace {

void check_pair(const GroundSpace& space, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  mu.check_space(space);
  nu.check_space(space);
}

TransportPlan plan_from_flow(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::vector<double> flow, double cost, std::vector<double> alpha,
                             std::vector<double> beta) {
  TransportPlan plan;
  plan.source = mu;
  plan.target = nu;
  plan.matrix = std::move(flow);
  plan.cost = cost;
  plan.dual_source = std::move(alpha);
  plan.dual_target = std::move(beta);
  plan.max_marginal_violation = plan.marginal_violation();
  return plan;
}

}  // namespace

TransportPlan solve_ot_exact(const GroundSpace& space, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu) {
  check_pair(space, mu, nu);
  const int m = static_cast<int>(mu.size()), n = static_cast<int>(nu.size());
  auto C = sq_cost_matrix(space, mu.support, nu.support);
  TransportSolution sol = solve_transport(C.data(), m, n, mu.weights, nu.weights);
  if (!sol.feasible)
    throw InfeasibleError("solve_ot_exact: every coupling crosses an infinite distance");
  return plan_from_flow(mu, nu, std::move(sol.flow), sol.cost, std::move(sol.alpha),
                        std::move(sol.beta));
}

TransportPlan oracle_ot_bruteforce(const GroundSpace& space, const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu) {
  check_pair(space, mu, nu);
  const size_t n = mu.size();
  if (n != nu.size() || n > 7)
    throw PreconditionError("oracle_ot_bruteforce: equal support sizes <= 7 required");
  for (size_t i = 0; i < n; ++i)
    if (std::fabs(mu.weights[i] - 1.0 / double(n)) > 1e-12 ||
        std::fabs(nu.weights[i] - 1.0 / double(n)) > 1e-12)
      throw PreconditionError("oracle_ot_bruteforce: uniform marginals required");

  auto C = sq_cost_matrix(space, mu.support, nu.support);
  std::vector<int> perm(n), best_perm;
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double cost = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double c = C[i * n + static_cast<size_t>(perm[i])];
      if (std::isinf(c)) {
        cost = kInf;
        break;
      }
      cost += c / double(n);
    }
    if (cost < best) {  // strict: keeps the lexicographically first optimum
      best = cost;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (std::isinf(best))
    throw InfeasibleError("oracle_ot_bruteforce: all permutations cross infinite distances");

  std::vector<double> flow(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) flow[i * n + static_cast<size_t>(best_perm[i])] = 1.0 / double(n);
  return plan_from_flow(mu, nu, std::move(flow), best, {}, {});
}

TransportPlan solve_ot_entropic(const GroundSpace& space, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, double epsilon) {
  check_pair(space, mu, nu);
  if (!(epsilon > 0.0)) throw PreconditionError("solve_ot_entropic: epsilon must be positive");
  const int m = static_cast<int>(mu.size()), n = static_cast<int>(nu.size());
  auto C = sq_cost_matrix(space, mu.support, nu.support);

  // A row or column with no finite cell can never meet its marginal.
  for (int i = 0; i < m; ++i) {
    bool finite = false;
    for (int j = 0; j < n; ++j) finite |= !std::isinf(C[static_cast<size_t>(i) * n + j]);
    if (!finite) throw InfeasibleError("solve_ot_entropic: isolated source atom");
  }
  for (int j = 0; j < n; ++j) {
    bool finite = false;
    for (int i = 0; i < m; ++i) finite |= !std::isinf(C[static_cast<size_t>(i) * n + j]);
    if (!finite) throw InfeasibleError("solve_ot_entropic: isolated target atom");
  }

  std::vector<double> loga(static_cast<size_t>(m)), logb(static_cast<size_t>(n));
  for (int i = 0; i < m; ++i) loga[static_cast<size_t>(i)] = std::log(mu.weights[static_cast<size_t>(i)]);
  for (int j = 0; j < n; ++j) logb[static_cast<size_t>(j)] = std::log(nu.weights[static_cast<size_t>(j)]);

  std::vector<double> f(static_cast<size_t>(m), 0.0), g(static_cast<size_t>(n), 0.0);
  std::vector<double> pi(static_cast<size_t>(m) * n, 0.0);

  auto fill_plan = [&]() {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        double c = C[static_cast<size_t>(i) * n + j];
        pi[static_cast<size_t>(i) * n + j] =
            std::isinf(c) ? 0.0
                          : std::exp((f[static_cast<size_t>(i)] + g[static_cast<size_t>(j)] - c) / epsilon +
                                     loga[static_cast<size_t>(i)] + logb[static_cast<size_t>(j)]);
      }
  };

  double violation = kInf;
  bool converged = false;
  long iters = 0;
  while (iters < kSinkhornCap) {
    kernels::sinkhorn_row_update(C.data(), m, n, g.data(), logb.data(), epsilon, f.data());
    kernels::sinkhorn_col_update(C.data(), m, n, f.data(), loga.data(), epsilon, g.data());
    ++iters;
    // columns are exact after the g-update; measure the rows
    fill_plan();
    violation = 0.0;
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += pi[static_cast<size_t>(i) * n + j];
      violation = std::max(violation, std::fabs(row - mu.weights[static_cast<size_t>(i)]));
    }
    if (violation < 1e-9) {
      converged = true;
      break;
    }
  }

  double cost = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double c = C[static_cast<size_t>(i) * n + j];
      if (!std::isinf(c)) cost += pi[static_cast<size_t>(i) * n + j] * c;
    }

  TransportPlan plan = plan_from_flow(mu, nu, std::move(pi), cost, f, g);
  plan.epsilon = epsilon;
  plan.converged = converged;
  return plan;
}

double w2(const GroundSpace& space, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  // Canonical argument order makes w2(mu,nu) == w2(nu,mu) bitwise.
  auto key = [](const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (a.support != b.support) return a.support < b.support;
    return a.weights < b.weights;
  };
  const DiscreteMeasure& first = key(mu, nu) ? mu : nu;
  const DiscreteMeasure& second = key(mu, nu) ? nu : mu;
  try {
    return std::sqrt(std::max(0.0, solve_ot_exact(space, first, second).cost));
  } catch (const InfeasibleError&) {
    return kInf;
  }
}

double w2_gaussian_sq(const GaussianMeasure& g1, const GaussianMeasure& g2) {
  if (g1.dim() != g2.dim()) throw PreconditionError("w2_gaussian: dimension mismatch");
  const double mean_sq = (g1.mean - g2.mean).squaredNorm();
  if (g1.dim() == 1) {
    double s1 = std::sqrt(g1.cov(0, 0)), s2 = std::sqrt(g2.cov(0, 0));
    return mean_sq + (s1 - s2) * (s1 - s2);
  }
  Matrix root2 = spd_sqrt(g2.cov);
  Matrix cross = spd_sqrt(root2 * g1.cov * root2);
  double tr = (g1.cov + g2.cov).trace() - 2.0 * cross.trace();
  return mean_sq + std::max(0.0, tr);
}

double w2_gaussian(const GaussianMeasure& g1, const GaussianMeasure& g2) {
  return std::sqrt(std::max(0.0, w2_gaussian_sq(g1, g2)));
}

}  // namespace otcl
