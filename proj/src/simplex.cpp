#include "otcl/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace otcl {

namespace {

constexpr double kPivTol = 1e-11;
constexpr long kBlandTrigger = 300;  // consecutive degenerate pivots

class RevisedSimplex {
 public:
  RevisedSimplex(std::span<const double> rhs, std::span<const LpColumn> cols)
      : rhs_(rhs.begin(), rhs.end()), cols_(cols), R_(static_cast<int>(rhs.size())) {
    for (double b : rhs_)
      if (b < 0.0) throw PreconditionError("solve_lp: rhs must be nonnegative");
    binv_.assign(static_cast<size_t>(R_) * R_, 0.0);
    for (int i = 0; i < R_; ++i) binv_[static_cast<size_t>(i) * R_ + i] = 1.0;
    basis_.resize(static_cast<size_t>(R_));
    xb_ = rhs_;
    // artificial variable ids live above the real columns
    is_basic_.assign(cols_.size() + static_cast<size_t>(R_), 0);
    for (int i = 0; i < R_; ++i) {
      basis_[static_cast<size_t>(i)] = n_real() + i;
      is_basic_[static_cast<size_t>(n_real() + i)] = 1;
    }
    max_cost_ = 1.0;
    for (const auto& c : cols_) max_cost_ = std::max(max_cost_, std::fabs(c.cost));
  }

  LpResult solve() {
    LpResult res;
    phase1_ = true;
    run();
    double infeas = 0.0;
    for (int i = 0; i < R_; ++i)
      if (basis_[static_cast<size_t>(i)] >= n_real()) infeas += std::max(0.0, xb_[static_cast<size_t>(i)]);
    if (infeas > 1e-9) {
      res.feasible = false;
      res.pivots = pivots_;
      return res;
    }
    purge_artificials();
    phase1_ = false;
    run();

    res.x.assign(static_cast<size_t>(n_real()), 0.0);
    res.objective = 0.0;
    for (int i = 0; i < R_; ++i) {
      int v = basis_[static_cast<size_t>(i)];
      if (v < n_real()) {
        double val = std::max(0.0, xb_[static_cast<size_t>(i)]);
        res.x[static_cast<size_t>(v)] = val;
        res.objective += val * cols_[static_cast<size_t>(v)].cost;
      }
    }
    res.pivots = pivots_;
    return res;
  }

 private:
  int n_real() const { return static_cast<int>(cols_.size()); }

  double cost_of(int v) const {
    if (phase1_) return v >= n_real() ? 1.0 : 0.0;
    return v >= n_real() ? 0.0 : cols_[static_cast<size_t>(v)].cost;
  }

  // y = c_B B^{-1}
  void compute_duals(std::vector<double>& y) const {
    y.assign(static_cast<size_t>(R_), 0.0);
    for (int i = 0; i < R_; ++i) {
      double cb = cost_of(basis_[static_cast<size_t>(i)]);
      if (cb == 0.0) continue;
      const double* row = binv_.data() + static_cast<size_t>(i) * R_;
      for (int j = 0; j < R_; ++j) y[static_cast<size_t>(j)] += cb * row[j];
    }
  }

  double reduced_cost(int v, const std::vector<double>& y) const {
    double rc = cost_of(v);
    for (const auto& [r, a] : cols_[static_cast<size_t>(v)].entries) rc -= y[static_cast<size_t>(r)] * a;
    return rc;
  }

  // d = B^{-1} A_v
  void ftran(int v, std::vector<double>& d) const {
    d.assign(static_cast<size_t>(R_), 0.0);
    for (const auto& [r, a] : cols_[static_cast<size_t>(v)].entries)
      for (int i = 0; i < R_; ++i) d[static_cast<size_t>(i)] += binv_[static_cast<size_t>(i) * R_ + r] * a;
  }

  void run() {
    std::vector<double> y, d;
    long degenerate_run = 0;
    const double rc_tol = 1e-10 * (1.0 + max_cost_);
    while (true) {
      compute_duals(y);
      const bool bland = degenerate_run > kBlandTrigger;
      int enter = -1;
      double best_rc = -rc_tol;
      for (int v = 0; v < n_real(); ++v) {
        if (in_basis(v)) continue;
        double rc = reduced_cost(v, y);
        if (rc < best_rc) {
          best_rc = rc;
          enter = v;
          if (bland) break;  // first (smallest-index) negative column
        }
      }
      if (enter < 0) return;

      ftran(enter, d);
      int leave = -1;
      double best_ratio = kInf;
      for (int i = 0; i < R_; ++i) {
        double di = d[static_cast<size_t>(i)];
        if (di > kPivTol) {
          double ratio = std::max(0.0, xb_[static_cast<size_t>(i)]) / di;
          if (ratio < best_ratio - 1e-13 ||
              (ratio < best_ratio + 1e-13 &&
               (leave < 0 || basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) throw SolverError("solve_lp: unbounded objective");

      degenerate_run = (best_ratio <= 1e-13) ? degenerate_run + 1 : 0;
      pivot(enter, leave, d, best_ratio);
      if (++pivots_ % 200 == 0) refactorize();
      if (pivots_ > 2000000) throw SolverError("solve_lp: pivot cap exceeded");
    }
  }

  void pivot(int enter, int leave, const std::vector<double>& d, double step) {
    for (int i = 0; i < R_; ++i) xb_[static_cast<size_t>(i)] -= step * d[static_cast<size_t>(i)];
    xb_[static_cast<size_t>(leave)] = step;
    is_basic_[static_cast<size_t>(basis_[static_cast<size_t>(leave)])] = 0;
    is_basic_[static_cast<size_t>(enter)] = 1;
    basis_[static_cast<size_t>(leave)] = enter;
    // eta update of the dense inverse
    const double piv = d[static_cast<size_t>(leave)];
    double* lrow = binv_.data() + static_cast<size_t>(leave) * R_;
    for (int j = 0; j < R_; ++j) lrow[j] /= piv;
    for (int i = 0; i < R_; ++i) {
      if (i == leave) continue;
      double f = d[static_cast<size_t>(i)];
      if (f == 0.0) continue;
      double* row = binv_.data() + static_cast<size_t>(i) * R_;
      for (int j = 0; j < R_; ++j) row[j] -= f * lrow[j];
    }
  }

  // Rebuild B^{-1} and x_B from the basis by Gauss-Jordan; keeps drift in check.
  void refactorize() {
    std::vector<double> B(static_cast<size_t>(R_) * R_, 0.0);
    for (int i = 0; i < R_; ++i) {
      int v = basis_[static_cast<size_t>(i)];
      if (v >= n_real()) {
        B[static_cast<size_t>(v - n_real()) * R_ + i] = 1.0;
      } else {
        for (const auto& [r, a] : cols_[static_cast<size_t>(v)].entries)
          B[static_cast<size_t>(r) * R_ + i] = a;
      }
    }
    std::vector<double> inv(static_cast<size_t>(R_) * R_, 0.0);
    for (int i = 0; i < R_; ++i) inv[static_cast<size_t>(i) * R_ + i] = 1.0;
    for (int col = 0; col < R_; ++col) {
      int piv = -1;
      double best = 1e-13;
      for (int r = col; r < R_; ++r)
        if (std::fabs(B[static_cast<size_t>(r) * R_ + col]) > best) {
          best = std::fabs(B[static_cast<size_t>(r) * R_ + col]);
          piv = r;
        }
      if (piv < 0) throw SolverError("solve_lp: singular basis during refactorization");
      if (piv != col) {
        for (int j = 0; j < R_; ++j) {
          std::swap(B[static_cast<size_t>(piv) * R_ + j], B[static_cast<size_t>(col) * R_ + j]);
          std::swap(inv[static_cast<size_t>(piv) * R_ + j], inv[static_cast<size_t>(col) * R_ + j]);
        }
      }
      double p = B[static_cast<size_t>(col) * R_ + col];
      for (int j = 0; j < R_; ++j) {
        B[static_cast<size_t>(col) * R_ + j] /= p;
        inv[static_cast<size_t>(col) * R_ + j] /= p;
      }
      for (int r = 0; r < R_; ++r) {
        if (r == col) continue;
        double f = B[static_cast<size_t>(r) * R_ + col];
        if (f == 0.0) continue;
        for (int j = 0; j < R_; ++j) {
          B[static_cast<size_t>(r) * R_ + j] -= f * B[static_cast<size_t>(col) * R_ + j];
          inv[static_cast<size_t>(r) * R_ + j] -= f * inv[static_cast<size_t>(col) * R_ + j];
        }
      }
    }
    binv_ = std::move(inv);
    xb_.assign(static_cast<size_t>(R_), 0.0);
    for (int i = 0; i < R_; ++i)
      for (int j = 0; j < R_; ++j)
        xb_[static_cast<size_t>(i)] += binv_[static_cast<size_t>(i) * R_ + j] * rhs_[static_cast<size_t>(j)];
  }

  // After phase 1: swap zero-valued artificials for any real column with a
  // nonzero coefficient in their row; rows with none are redundant and keep a
  // pinned artificial (harmless at zero).
  void purge_artificials() {
    std::vector<double> d;
    for (int i = 0; i < R_; ++i) {
      if (basis_[static_cast<size_t>(i)] < n_real()) continue;
      for (int v = 0; v < n_real(); ++v) {
        if (in_basis(v)) continue;
        ftran(v, d);
        if (std::fabs(d[static_cast<size_t>(i)]) > 1e-9) {
          pivot(v, i, d, 0.0);
          ++pivots_;
          break;
        }
      }
    }
  }

  bool in_basis(int v) const { return is_basic_[static_cast<size_t>(v)] != 0; }

  std::vector<double> rhs_;
  std::span<const LpColumn> cols_;
  int R_;
  bool phase1_ = true;
  double max_cost_ = 1.0;
  long pivots_ = 0;
  std::vector<double> binv_, xb_;
  std::vector<int> basis_;
  std::vector<char> is_basic_;
};

}  // namespace

LpResult solve_lp(std::span<const double> rhs, std::span<const LpColumn> columns) {
  RevisedSimplex s(rhs, columns);
  return s.solve();
}

}  // namespace otcl
