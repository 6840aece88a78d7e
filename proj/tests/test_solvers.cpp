#include <gtest/gtest.h>

#include <random>

#include "animc/errors.hpp"
#include "animc/solvers.hpp"
#include "helpers.hpp"

using namespace animc;

namespace {

ThetaDiag diag_of(const Vector& d) {
  ThetaDiag D;
  D.diag = d;
  return D;
}

}  // namespace

TEST(Sylvester, IdentityCases) {
  Matrix C(1, 2);
  C << 1, 2;
  SylvesterProblem p{Matrix::Zero(2, 2), Matrix::Identity(1, 1), C};
  EXPECT_TRUE(solve_sylvester(p).isApprox(C, 1e-12));
  Matrix C2(1, 2);
  C2 << 2, 4;
  SylvesterProblem q{Matrix::Identity(2, 2), Matrix::Identity(1, 1), C2};
  EXPECT_TRUE(solve_sylvester(q).isApprox(C, 1e-12));
}

TEST(Sylvester, RoundTrip) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int t = 0; t < 40; ++t) {
    const int d = dim(rng), c = dim(rng);
    const Matrix M = fixtures::random_spd(c, rng);
    const Matrix N = fixtures::random_spd(d, rng);
    const Matrix U = fixtures::gaussian(d, c, rng);
    const Matrix got = solve_sylvester({M, N, U * M + N * U});
    EXPECT_LE((got - U).norm(), 1e-8 * std::max(1.0, U.norm()));
  }
}

TEST(Sylvester, SemidefiniteParts) {
  // N = 0 with M SPD reduces to U = C M^-1.
  std::mt19937_64 rng(4);
  const Matrix M = fixtures::random_spd(3, rng);
  const Matrix C = fixtures::gaussian(5, 3, rng);
  const Matrix U = solve_sylvester({M, Matrix::Zero(5, 5), C});
  EXPECT_LE((U * M - C).norm(), 1e-9);
}

TEST(Sylvester, RidgeRetryThenError) {
  // Zero operator: the ridge retry solves (1e-10 I) U = C.
  SylvesterProblem p{Matrix::Zero(2, 2), Matrix::Zero(3, 3), Matrix::Ones(3, 2)};
  EXPECT_TRUE(solve_sylvester(p).isApprox(Matrix::Constant(3, 2, 1e10), 1e-12));
  // Negative definite operator stays indefinite after the ridge.
  SylvesterProblem q{-Matrix::Identity(2, 2), Matrix::Zero(3, 3), Matrix::Ones(3, 2)};
  EXPECT_THROW(solve_sylvester(q), SolverError);
}

TEST(Sylvester, ShapeChecks) {
  EXPECT_THROW(solve_sylvester({Matrix::Identity(2, 2), Matrix::Identity(3, 3),
                                Matrix::Ones(2, 2)}),
               DimensionError);
  Matrix asym(2, 2);
  asym << 1, 2, 0, 1;
  EXPECT_THROW(solve_sylvester({asym, Matrix::Identity(1, 1), Matrix::Ones(1, 2)}),
               DimensionError);
}

TEST(SolveSpd, Examples) {
  EXPECT_TRUE(solve_spd(2.0 * Matrix::Identity(3, 3), Matrix::Identity(3, 3))
                  .isApprox(0.5 * Matrix::Identity(3, 3)));
  Matrix K = Matrix::Zero(2, 2);
  K.diagonal() << 1, 4;
  Matrix Y(2, 1);
  Y << 1, 8;
  Matrix Z(2, 1);
  Z << 1, 2;
  EXPECT_TRUE(solve_spd(K, Y).isApprox(Z));
}

TEST(SolveSpd, RoundTripAndFailure) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const Matrix K = fixtures::random_spd(7, rng);
    const Matrix Z = fixtures::gaussian(7, 3, rng);
    EXPECT_LE((solve_spd(K, K * Z) - Z).norm(), 1e-8 * std::max(1.0, Z.norm()));
  }
  Matrix neg = -Matrix::Identity(2, 2);
  EXPECT_THROW(solve_spd(neg, Matrix::Ones(2, 1)), SolverError);
  EXPECT_THROW(solve_spd(Matrix::Identity(2, 2), Matrix::Ones(3, 1)), DimensionError);
}

TEST(SolveA, ScalarExample) {
  const Matrix U = Matrix::Ones(1, 1);
  const auto D = diag_of(Vector::Ones(1));
  EXPECT_NEAR(solve_A_direct(U, D, 1.0, 1.0)(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(solve_A_woodbury(U, D, 1.0, 1.0)(0, 0), 0.5, 1e-14);
}

TEST(SolveA, OrthogonalUAtSmallBeta) {
  std::mt19937_64 rng(21);
  const Eigen::HouseholderQR<Matrix> qr(fixtures::gaussian(4, 4, rng));
  const Matrix Q = qr.householderQ();
  const auto D = diag_of(Vector::Ones(4));
  EXPECT_LE((solve_A_direct(Q, D, 1.0, 1e-12) - Q).norm(), 1e-9);
}

TEST(SolveA, SmallBetaAlignsRegression) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 10; ++t) {
    const Matrix U = fixtures::gaussian(9, 3, rng);
    const auto D = diag_of(fixtures::uniform(9, 1, 0.5, 2.0, rng));
    const Matrix A = solve_A_woodbury(U, D, 1.0, 1e-9);
    EXPECT_LE((A.transpose() * U - Matrix::Identity(3, 3)).norm(), 1e-6);
  }
}

TEST(SolveA, WoodburyMatchesDirect) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> dim(1, 15);
  std::uniform_real_distribution<double> par(0.01, 10.0);
  for (int t = 0; t < 50; ++t) {
    const int d = dim(rng);
    const int c = std::uniform_int_distribution<int>(1, d)(rng);
    const Matrix U = fixtures::gaussian(d, c, rng);
    const auto D = diag_of(fixtures::uniform(d, 1, 0.1, 3.0, rng));
    const double alpha = par(rng), beta = par(rng);
    const Matrix a = solve_A_direct(U, D, alpha, beta);
    const Matrix b = solve_A_woodbury(U, D, alpha, beta);
    EXPECT_LE((a - b).norm(), 1e-8 * std::max(1.0, a.norm()));
  }
  const Matrix U = fixtures::gaussian(50, 2, rng);
  const auto D = diag_of(fixtures::uniform(50, 1, 0.1, 3.0, rng));
  EXPECT_LE((solve_A_direct(U, D, 0.1, 10.0) - solve_A_woodbury(U, D, 0.1, 10.0)).norm(),
            1e-10);
}

TEST(SolveA, Stationarity) {
  // Gradient of alpha||A^T U - I||^2 + beta tr(A^T diag(D) A) vanishes.
  std::mt19937_64 rng(24);
  const Matrix U = fixtures::gaussian(8, 3, rng);
  const auto D = diag_of(fixtures::uniform(8, 1, 0.1, 3.0, rng));
  const double alpha = 0.7, beta = 2.5;
  const Matrix A = solve_A_woodbury(U, D, alpha, beta);
  const Matrix grad = 2 * alpha * U * (U.transpose() * A - Matrix::Identity(3, 3)) +
                      2 * beta * D.diag.asDiagonal() * A;
  EXPECT_LE(grad.norm(), 1e-10);
}

TEST(SolveA, DegenerateParameters) {
  const Matrix U = Matrix::Ones(3, 1);
  const auto D = diag_of(Vector::Ones(3));
  EXPECT_THROW(solve_A_direct(U, D, 0.0, 0.0), DomainError);
  EXPECT_THROW(solve_A_direct(U, D, -1.0, 1.0), DomainError);
  EXPECT_THROW(solve_A_direct(U, diag_of(Vector::Ones(2)), 1.0, 1.0), DimensionError);
  EXPECT_THROW(solve_A_direct(U, diag_of(Vector::Zero(3)), 1.0, 1.0), DomainError);
  // alpha = 0: pure penalty, A = 0.
  EXPECT_LE(solve_A_woodbury(U, D, 0.0, 1.0).norm(), 1e-15);
}
