#pragma once

// Single-view reference factorizations (RMF, semi-NMF, semi-RNMF) and the
// unweighted incomplete multi-view model used as the equal-weight ablation.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "animc/animc.hpp"
#include "animc/dataset.hpp"
#include "animc/errors.hpp"
#include "animc/multiplicative.hpp"
#include "animc/solvers.hpp"

namespace animc {

struct IterationControl {
  int max_iter = 100;
  double rel_tol = 1e-6;
  double epsilon_floor = 1e-12;
  std::uint64_t seed = 0;
};

struct FactorizationResult {
  std::vector<Matrix> U;  // one basis per view (single entry for 1-view fits)
  Matrix V;
  std::vector<double> objective_trace;
  int iterations_run = 0;
};

namespace detail {

inline void check_rank(const Matrix& X, int c) {
  if (c <= 0 || c > std::min(X.rows(), X.cols())) {
    throw DomainError("factorization rank must satisfy 0 < c <= min(d, n)");
  }
}

inline Matrix initial_V(Eigen::Index n, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return uniform_matrix(n, c, 0.1, 1.0, rng);
}

// Closed-form ridge step: B (alpha I + F^T F)^{-1} with B = Y F.
inline Matrix ridge_factor(const Matrix& Y, const Matrix& F, double alpha) {
  Matrix K = F.transpose() * F;
  K.diagonal().array() += alpha;
  const Matrix rhs = (Y * F).transpose();
  return solve_spd(K, rhs).transpose();
}

inline bool converged(const std::vector<double>& trace, double tol) {
  const double prev = trace[trace.size() - 2];
  return std::abs(trace.back() - prev) <= tol * std::max(std::abs(prev), 1e-300);
}

inline double regularized_loss(const Matrix& X, const Matrix& U,
                               const Matrix& V, double alpha) {
  return (X - U * V.transpose()).squaredNorm() +
         alpha * (U.squaredNorm() + V.squaredNorm());
}

}  // namespace detail

/// min ||X - U V^T||^2 + alpha (||U||^2 + ||V||^2) by alternating ridge
/// solves.
inline FactorizationResult rmf_fit(const Matrix& X, int c, double alpha,
                                   const IterationControl& ctrl) {
  detail::check_rank(X, c);
  if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");
  Matrix V = detail::initial_V(X.cols(), c, ctrl.seed);
  Matrix U = detail::ridge_factor(X, V, alpha);
  FactorizationResult out;
  out.objective_trace.push_back(detail::regularized_loss(X, U, V, alpha));
  const Matrix Xt = X.transpose();
  for (int it = 1; it <= ctrl.max_iter; ++it) {
    V = detail::ridge_factor(Xt, U, alpha);
    U = detail::ridge_factor(X, V, alpha);
    out.objective_trace.push_back(detail::regularized_loss(X, U, V, alpha));
    out.iterations_run = it;
    if (detail::converged(out.objective_trace, ctrl.rel_tol)) break;
  }
  out.U = {std::move(U)};
  out.V = std::move(V);
  return out;
}

/// One multiplicative V step of semi-RNMF (semi-NMF at alpha = 0).
inline Matrix semi_rnmf_V_step(const Matrix& X, const Matrix& U,
                               const Matrix& V, double alpha, double floor) {
  Matrix gram = U.transpose() * U;
  gram.diagonal().array() += alpha;
  Matrix out = V;
  multiplicative_update(out, X.transpose() * U,
                        {QuadraticTerm{Vector::Ones(V.rows()), gram}}, Vector(),
                        floor);
  return out;
}

/// Semi-NMF with ridge terms: U by closed form, V >= 0 multiplicatively.
inline FactorizationResult semi_rnmf_fit(const Matrix& X, int c, double alpha,
                                         const IterationControl& ctrl) {
  detail::check_rank(X, c);
  if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");
  Matrix V = detail::initial_V(X.cols(), c, ctrl.seed);
  Matrix U = detail::ridge_factor(X, V, alpha);
  FactorizationResult out;
  out.objective_trace.push_back(detail::regularized_loss(X, U, V, alpha));
  for (int it = 1; it <= ctrl.max_iter; ++it) {
    V = semi_rnmf_V_step(X, U, V, alpha, ctrl.epsilon_floor);
    U = detail::ridge_factor(X, V, alpha);
    out.objective_trace.push_back(detail::regularized_loss(X, U, V, alpha));
    out.iterations_run = it;
    if (detail::converged(out.objective_trace, ctrl.rel_tol)) break;
  }
  out.U = {std::move(U)};
  out.V = std::move(V);
  return out;
}

inline FactorizationResult semi_nmf_fit(const Matrix& X, int c,
                                        const IterationControl& ctrl) {
  return semi_rnmf_fit(X, c, 0.0, ctrl);
}

/// Equal-weight incomplete multi-view model: the ANIMC optimizer with the
/// weight step disabled and every w_v held at 1. The trace is the full
/// objective evaluated at w = 1.
inline FactorizationResult naive_incomplete_fit(const MultiViewDataset& ds,
                                                double alpha, double r,
                                                const IterationControl& ctrl,
                                                Hyperparams base = {}) {
  if (!(r > 0.0 && r <= 2.0)) throw DomainError("r must lie in (0, 2]");
  AnimcConfig cfg;
  cfg.hp = base;
  cfg.hp.alpha = alpha;
  cfg.hp.r = r;
  cfg.hp.max_iter = ctrl.max_iter;
  cfg.hp.rel_tol = ctrl.rel_tol;
  cfg.hp.epsilon_floor = ctrl.epsilon_floor;
  cfg.freeze_weights = true;
  cfg.initial_weight = 1.0;
  cfg.seed = ctrl.seed;
  FitResult res = fit(ds, cfg);
  FactorizationResult out;
  out.U = std::move(res.state.U);
  out.V = std::move(res.state.V);
  for (const auto& rec : res.trace.records) {
    out.objective_trace.push_back(rec.objective);
  }
  out.iterations_run = res.iterations;
  return out;
}

}  // namespace animc
