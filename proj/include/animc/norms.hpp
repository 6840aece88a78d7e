#pragma once

// Row-structured matrix norms.
//
// The theta-norm interpolates between the squared Frobenius norm and the
// L2,1 norm. With s_i the Euclidean norm of row i,
//
//   ||B||_theta = sum_i (1 + theta) s_i^2 / (1 + theta s_i)
//
// which tends to sum_i s_i^2 as theta -> 0 and to sum_i s_i as theta -> inf.
// Its gradient is D_B B with the diagonal
//
//   D_ii = (1 + theta)(2 + theta s_i) / (1 + theta s_i)^2,
//
// which tends to 2 as theta -> 0 and to 1 / s_i as theta -> inf. As a
// function of s_i^2 each summand is concave, so a quadratic built from D at
// the current point majorizes the norm; the A and V steps rely on this.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "animc/dataset.hpp"
#include "animc/errors.hpp"

namespace animc {

struct ThetaDiag {
  Vector diag;  // one positive entry per row
  double theta = 1.0;
};

inline double frobenius_norm(const Matrix& B) { return B.norm(); }

inline double l21_norm(const Matrix& B) {
  return B.rowwise().norm().sum();
}

namespace detail {

inline void require_positive_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("theta must be a positive finite number");
  }
}

inline double theta_term(double s, double theta) {
  return (1.0 + theta) * s * s / (1.0 + theta * s);
}

inline double theta_weight(double s, double theta) {
  const double t = 1.0 + theta * s;
  return (1.0 + theta) * (2.0 + theta * s) / (t * t);
}

}  // namespace detail

inline double theta_norm(const Matrix& B, double theta) {
  detail::require_positive_theta(theta);
  const Vector s = B.rowwise().norm();
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    total += detail::theta_term(s[i], theta);
  }
  return total;
}

/// Diagonal gradient operator. Rows with norm below `floor` are evaluated
/// at s = floor so every entry stays finite.
inline ThetaDiag theta_diag(const Matrix& B, double theta,
                            double floor = 1e-12) {
  detail::require_positive_theta(theta);
  ThetaDiag out;
  out.theta = theta;
  out.diag.resize(B.rows());
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    const double s = std::max(B.row(i).norm(), floor);
    out.diag[i] = detail::theta_weight(s, theta);
  }
  return out;
}

inline Matrix theta_norm_gradient(const Matrix& B, double theta,
                                  double floor = 1e-12) {
  return theta_diag(B, theta, floor).diag.asDiagonal() * B;
}

}  // namespace animc
