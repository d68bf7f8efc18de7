#pragma once

#include <Eigen/Dense>

#include "otcl/common.hpp"

namespace otcl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Eigenvalues are clamped below at this value when forming SPD roots; the
// clamp count is surfaced by spd_sqrt_clamped for callers that record it.
inline constexpr double kEigenFloor = 1e-14;

inline bool is_symmetric(const Matrix& m, double tol = 1e-12) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_spd(const Matrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols() || !is_symmetric(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().minCoeff() > 0.0;
}

inline Matrix spd_sqrt_clamped(const Matrix& m, int* clamped = nullptr) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector ev = es.eigenvalues();
  int n_clamped = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < kEigenFloor) {
      ev[i] = kEigenFloor;
      ++n_clamped;
    }
  }
  if (clamped) *clamped = n_clamped;
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

inline Matrix spd_sqrt(const Matrix& m) { return spd_sqrt_clamped(m, nullptr); }

inline Matrix spd_inverse_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = 1.0 / std::sqrt(std::max(ev[i], kEigenFloor));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline double log_det_spd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()[i];
    if (ev <= 0.0) throw PreconditionError("log_det_spd: matrix is not positive definite");
    s += std::log(ev);
  }
  return s;
}

}  // namespace otcl
