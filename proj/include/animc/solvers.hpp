#pragma once

// Dense linear-algebra kernels for the per-view U and A updates.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "animc/dataset.hpp"
#include "animc/errors.hpp"
#include "animc/norms.hpp"

namespace animc {

/// U M + N U = C with M (c x c) and N (d x d) symmetric PSD.
struct SylvesterProblem {
  Matrix M;
  Matrix N;
  Matrix C;
};

inline constexpr double kRidge = 1e-10;

namespace detail {

inline bool solution_ok(const Matrix& K, const Matrix& Z, const Matrix& Y) {
  if (!Z.allFinite()) return false;
  return (K * Z - Y).norm() <= 1e-6 * (1.0 + K.norm() * Z.norm() + Y.norm());
}

// Cholesky solve with a single ridge retry. The ridge is relative to the
// largest diagonal entry so it stays meaningful for badly scaled systems.
inline Matrix solve_symmetric(const Matrix& K, const Matrix& Y,
                              const char* what) {
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() == Eigen::Success) {
    Matrix Z = llt.solve(Y);
    if (solution_ok(K, Z, Y)) return Z;
  }
  const double scale = std::max(1.0, K.diagonal().cwiseAbs().maxCoeff());
  Matrix Kr = K;
  Kr.diagonal().array() += kRidge * scale;
  llt.compute(Kr);
  if (llt.info() == Eigen::Success) {
    Matrix Z = llt.solve(Y);
    if (solution_ok(Kr, Z, Y)) return Z;
  }
  throw SolverError(std::string(what) + ": system is singular after ridge");
}

inline void require_symmetric(const Matrix& S, const char* what) {
  if (S.rows() != S.cols()) {
    throw DimensionError(std::string(what) + " must be square");
  }
  const double tol = 1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff());
  if (((S - S.transpose()).cwiseAbs().array() > tol).any()) {
    throw DimensionError(std::string(what) + " must be symmetric");
  }
}

}  // namespace detail

/// Solves K Z = Y for symmetric positive definite K.
inline Matrix solve_spd(const Matrix& K, const Matrix& Y) {
  if (K.rows() != K.cols() || K.rows() != Y.rows()) {
    throw DimensionError("solve_spd: K " + detail::shape(K.rows(), K.cols()) +
                         ", Y " + detail::shape(Y.rows(), Y.cols()));
  }
  return detail::solve_symmetric(K, Y, "solve_spd");
}

/// Kronecker vectorization: (M^T (x) I_d + I_c (x) N) vec(U) = vec(C).
/// The operator is dc x dc, so this path is meant for d * c up to a few
/// thousand.
inline Matrix solve_sylvester(const SylvesterProblem& p) {
  const Eigen::Index c = p.M.rows();
  const Eigen::Index d = p.N.rows();
  detail::require_symmetric(p.M, "Sylvester M");
  detail::require_symmetric(p.N, "Sylvester N");
  if (p.C.rows() != d || p.C.cols() != c) {
    throw DimensionError("Sylvester C is " +
                         detail::shape(p.C.rows(), p.C.cols()) +
                         ", expected " + detail::shape(d, c));
  }
  const Eigen::Index dc = d * c;
  Matrix K = Matrix::Zero(dc, dc);
  // Block (j, l) of M^T (x) I is M(l, j) I_d; block (j, j) of I (x) N is N.
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index l = 0; l < c; ++l) {
      K.block(j * d, l * d, d, d).diagonal().setConstant(p.M(l, j));
    }
    K.block(j * d, j * d, d, d) += p.N;
  }
  const Eigen::Map<const Vector> rhs(p.C.data(), dc);
  const Matrix x = detail::solve_symmetric(K, rhs, "solve_sylvester");
  return Eigen::Map<const Matrix>(x.data(), d, c);
}

namespace detail {

inline void check_A_inputs(const Matrix& U, const ThetaDiag& D, double alpha,
                           double beta) {
  if (D.diag.size() != U.rows()) {
    throw DimensionError("D_A length differs from the row count of U");
  }
  if (!(alpha >= 0.0) || !(beta >= 0.0) || (alpha == 0.0 && beta == 0.0)) {
    throw DomainError("A-solve needs alpha, beta >= 0, not both zero");
  }
  if (!(D.diag.array() > 0.0).all()) {
    throw DomainError("D_A entries must be positive");
  }
}

}  // namespace detail

/// A = alpha (alpha U U^T + beta diag(D))^{-1} U via a d x d solve.
inline Matrix solve_A_direct(const Matrix& U, const ThetaDiag& D, double alpha,
                             double beta) {
  detail::check_A_inputs(U, D, alpha, beta);
  Matrix K = alpha * U * U.transpose();
  K.diagonal() += beta * D.diag;
  return detail::solve_symmetric(K, alpha * U, "solve_A_direct");
}

/// Same result as solve_A_direct through the Woodbury identity:
///
///   (alpha/beta) [D^-1 - D^-1 U (U^T D^-1 U + (beta/alpha) I)^-1 U^T D^-1] U
///
/// With P = D^-1 U and S = U^T P the bracket collapses to
/// (beta/alpha) P (S + (beta/alpha) I)^-1, so only a c x c system is solved
/// and the subtraction never has to cancel.
inline Matrix solve_A_woodbury(const Matrix& U, const ThetaDiag& D,
                               double alpha, double beta) {
  detail::check_A_inputs(U, D, alpha, beta);
  if (alpha == 0.0 || beta == 0.0) return solve_A_direct(U, D, alpha, beta);
  const Matrix P = D.diag.cwiseInverse().asDiagonal() * U;
  Matrix S = U.transpose() * P;
  S.diagonal().array() += beta / alpha;
  // A = P S^-1  <=>  S^T A^T = P^T, S symmetric.
  const Matrix At =
      detail::solve_symmetric(S, P.transpose(), "solve_A_woodbury");
  return At.transpose();
}

}  // namespace animc
