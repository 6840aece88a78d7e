#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "animc/errors.hpp"
#include "animc/norms.hpp"
#include "helpers.hpp"

using namespace animc;

namespace {

Matrix row34() {
  Matrix B(1, 2);
  B << 3, 4;
  return B;
}

}  // namespace

TEST(Frobenius, Examples) {
  EXPECT_DOUBLE_EQ(frobenius_norm(row34()), 5.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(Matrix::Zero(3, 2)), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(Matrix::Identity(2, 2)), std::sqrt(2.0));
}

TEST(L21, Examples) {
  Matrix B(2, 2);
  B << 3, 4, 0, 0;
  EXPECT_DOUBLE_EQ(l21_norm(B), 5.0);
  EXPECT_DOUBLE_EQ(l21_norm(Matrix::Identity(2, 2)), 2.0);
  Matrix C(3, 2);
  C << 1, 0, 0, 1, 1, 0;
  EXPECT_DOUBLE_EQ(l21_norm(C), 3.0);
}

TEST(ThetaNorm, ClosedForm) {
  EXPECT_NEAR(theta_norm(row34(), 1.0), 25.0 / 3.0, 1e-12);
}

TEST(ThetaNorm, Limits) {
  EXPECT_NEAR(theta_norm(row34(), 1e-9), 25.0, 1e-6);
  EXPECT_NEAR(theta_norm(row34(), 1e9), 5.0, 1e-6);
}

TEST(ThetaNorm, RejectsNonPositiveTheta) {
  EXPECT_THROW(theta_norm(row34(), 0.0), DomainError);
  EXPECT_THROW(theta_norm(row34(), -1.0), DomainError);
  EXPECT_THROW(theta_diag(row34(), 0.0), DomainError);
}

TEST(ThetaNorm, MonotoneDecreasingInTheta) {
  // Each row term (1+t)s^2/(1+ts) moves from s^2 toward s; for s > 1 it
  // shrinks as theta grows.
  std::mt19937_64 rng(5);
  const Matrix B = 3.0 + fixtures::uniform(6, 3, 0.0, 1.0, rng).array();
  double prev = theta_norm(B, 1e-6);
  for (double t : {1e-3, 1e-1, 1.0, 10.0, 1e3}) {
    const double cur = theta_norm(B, t);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(ThetaDiag, Examples) {
  EXPECT_NEAR(theta_diag(row34(), 1.0).diag[0], 7.0 / 18.0, 1e-12);
  EXPECT_NEAR(theta_diag(row34(), 1e9).diag[0], 0.2, 1e-6);
  EXPECT_NEAR(theta_diag(row34(), 1e-9).diag[0], 2.0, 1e-6);
}

TEST(ThetaDiag, FloorsZeroRows) {
  Matrix B = Matrix::Zero(2, 3);
  B.row(1) << 1, 2, 2;
  const auto D = theta_diag(B, 100.0);
  EXPECT_TRUE(D.diag.allFinite());
  EXPECT_GT(D.diag[0], 0.0);
}

TEST(ThetaGradient, Examples) {
  const Matrix g = theta_norm_gradient(row34(), 1.0);
  EXPECT_NEAR(g(0, 0), 7.0 / 18.0 * 3.0, 1e-12);
  EXPECT_NEAR(g(0, 1), 7.0 / 18.0 * 4.0, 1e-12);
  const Matrix z = theta_norm_gradient(Matrix::Zero(1, 2), 1.0);
  EXPECT_LT(z.norm(), 1e-9);
  const Matrix big = theta_norm_gradient(row34(), 1e9);
  EXPECT_NEAR(big(0, 0), 0.6, 1e-6);
  EXPECT_NEAR(big(0, 1), 0.8, 1e-6);
}

TEST(ThetaGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (double theta : {0.01, 1.0, 100.0}) {
    for (int t = 0; t < 20; ++t) {
      const Matrix B = fixtures::gaussian(4, 3, rng);
      const Matrix G = theta_norm_gradient(B, theta);
      const double h = 1e-6;
      for (Eigen::Index i = 0; i < B.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.cols(); ++j) {
          Matrix Bp = B, Bm = B;
          Bp(i, j) += h;
          Bm(i, j) -= h;
          const double fd = (theta_norm(Bp, theta) - theta_norm(Bm, theta)) / (2 * h);
          EXPECT_NEAR(G(i, j), fd, 1e-6 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

// Each row term f(s) = (1+t)s^2/(1+ts) is concave in s^2, so the quadratic
// q(x) = f(s0) + (D/2)(x^2 - s0^2) with D the diag entry bounds it from above.
TEST(ThetaDiag, HalfDiagonalMajorizes) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (double theta : {0.01, 1.0, 100.0}) {
    for (int t = 0; t < 200; ++t) {
      const double s0 = u(rng) + 1e-3;
      const double x = u(rng);
      Matrix b0(1, 1), bx(1, 1);
      b0 << s0;
      bx << x;
      const double D = theta_diag(b0, theta).diag[0];
      const double q = theta_norm(b0, theta) + 0.5 * D * (x * x - s0 * s0);
      EXPECT_LE(theta_norm(bx, theta), q + 1e-9 * std::max(1.0, q));
    }
  }
}
