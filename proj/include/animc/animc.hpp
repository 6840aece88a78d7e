#pragma once

// Auto-weighted noisy and incomplete multi-view clustering.
//
// Minimizes over U^(v), A^(v) and V >= 0
//
//   L = sum_v [ w_v ||G (.) (X - U V^T)||_F^2 + alpha ||A^T U - I||_F^2
//               + beta ||A||_{theta_A} ] + alpha ||V||_{theta_V}
//
// with view weights recomputed from the residuals after every sweep:
//
//   w_v = min( 0.5 r ||G (.) E||_F^(0.5 r - 1), ||E||_F^(-0.5) ),  E = X - U V^T.
//
// One sweep runs U (Sylvester solve), A (reweighted ridge via Woodbury),
// V (multiplicative KKT update) with column normalization, then w.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "animc/dataset.hpp"
#include "animc/errors.hpp"
#include "animc/metrics.hpp"
#include "animc/multiplicative.hpp"
#include "animc/norms.hpp"
#include "animc/solvers.hpp"

namespace animc {

enum class LabelMode { kmeans, argmax };

struct AnimcConfig {
  Hyperparams hp;
  bool enable_soft_boundary = true;
  // Weight step disabled; w stays at its initial value.
  bool freeze_weights = false;
  // Scale the boundary branch by 0.5 (prose variant of the weight rule).
  bool half_boundary = false;
  // Column normalization after the V step.
  bool normalize = true;
  // Initial weight for every view; unset means 1/m.
  std::optional<double> initial_weight;
  LabelMode label_mode = LabelMode::kmeans;
  std::uint64_t seed = 0;
};

struct TraceRecord {
  int iter = 0;
  double objective = 0.0;
  double r_objective = 0.0;
  Vector w;
  std::vector<double> residual_norms;  // ||G (.) E||_F per view
};

struct IterationTrace {
  std::vector<TraceRecord> records;
};

struct FitResult {
  ModelState state;
  IterationTrace trace;
  int iterations = 0;
  bool converged = false;
};

struct ObjectiveTerms {
  std::vector<double> data;        // w_v ||G (.) E||^2
  std::vector<double> regression;  // alpha ||A^T U - I||^2
  std::vector<double> sparsity;    // beta ||A||_theta
  double latent = 0.0;             // alpha ||V||_theta

  double total() const {
    double t = latent;
    for (std::size_t v = 0; v < data.size(); ++v) {
      t += data[v] + regression[v] + sparsity[v];
    }
    return t;
  }
};

inline ObjectiveTerms objective_terms(const MultiViewDataset& ds,
                                      const ModelState& s,
                                      const Hyperparams& hp) {
  check_state(ds, s);
  ObjectiveTerms t;
  const Eigen::Index c = s.V.cols();
  const Matrix I = Matrix::Identity(c, c);
  auto finite = [](double x, const std::string& what) {
    if (!std::isfinite(x)) throw NumericError("non-finite objective term: " + what);
    return x;
  };
  for (std::size_t v = 0; v < ds.m(); ++v) {
    const auto& view = ds.views[v];
    const std::string tag = " (view " + std::to_string(v) + ")";
    const double res =
        masked_residual(view.x.data, view.mask, s.U[v], s.V).squaredNorm();
    t.data.push_back(finite(s.w[v] * res, "data fit" + tag));
    t.regression.push_back(finite(
        hp.alpha * (s.A[v].transpose() * s.U[v] - I).squaredNorm(),
        "regression" + tag));
    t.sparsity.push_back(
        finite(hp.beta * theta_norm(s.A[v], hp.theta_A), "A theta-norm" + tag));
  }
  t.latent = finite(hp.alpha * theta_norm(s.V, hp.theta_V), "V theta-norm");
  return t;
}

inline double objective(const MultiViewDataset& ds, const ModelState& s,
                        const Hyperparams& hp) {
  return objective_terms(ds, s, hp).total();
}

/// The power-r objective without view weights, reported alongside L:
/// sum_v ( ||G (.) E||^r + alpha (||U||^2 + ||V||^2) ).
inline double r_objective(const MultiViewDataset& ds, const ModelState& s,
                          const Hyperparams& hp) {
  double total = 0.0;
  const double v2 = s.V.squaredNorm();
  for (std::size_t v = 0; v < ds.m(); ++v) {
    const auto& view = ds.views[v];
    const double res =
        masked_residual(view.x.data, view.mask, s.U[v], s.V).norm();
    total += std::pow(res, hp.r) + hp.alpha * (s.U[v].squaredNorm() + v2);
  }
  return total;
}

/// Per-step sub-objectives with the other blocks fixed.
inline double sub_objective_U(const MultiViewDataset& ds, const ModelState& s,
                              const Hyperparams& hp, std::size_t v) {
  const Eigen::Index c = s.V.cols();
  const auto& view = ds.views[v];
  return s.w[v] * masked_residual(view.x.data, view.mask, s.U[v], s.V)
                      .squaredNorm() +
         hp.alpha *
             (s.A[v].transpose() * s.U[v] - Matrix::Identity(c, c))
                 .squaredNorm();
}

inline double sub_objective_A(const ModelState& s, const Hyperparams& hp,
                              std::size_t v) {
  const Eigen::Index c = s.V.cols();
  return hp.alpha * (s.A[v].transpose() * s.U[v] - Matrix::Identity(c, c))
                        .squaredNorm() +
         hp.beta * theta_norm(s.A[v], hp.theta_A);
}

inline double sub_objective_V(const MultiViewDataset& ds, const ModelState& s,
                              const Hyperparams& hp) {
  double total = hp.alpha * theta_norm(s.V, hp.theta_V);
  for (std::size_t v = 0; v < ds.m(); ++v) {
    const auto& view = ds.views[v];
    total += s.w[v] *
             masked_residual(view.x.data, view.mask, s.U[v], s.V).squaredNorm();
  }
  return total;
}

struct WeightDetail {
  double unbounded = 0.0;  // 0.5 r ||G (.) E||^(0.5 r - 1)
  double boundary = 0.0;   // ||E||^(-0.5), optionally halved
  double w = 0.0;
};

struct WeightOptions {
  double r = 0.2;
  bool soft_boundary = true;
  bool half_boundary = false;
  double floor = 1e-12;
};

/// Weight rule for every view. Residual norms are floored before the
/// negative powers. E is X - U V^T over all columns, so zero-filled absent
/// instances contribute their reconstruction to the boundary term.
inline std::vector<WeightDetail> weight_details(const MultiViewDataset& ds,
                                                const ModelState& s,
                                                const WeightOptions& opt) {
  if (!(opt.r > 0.0 && opt.r <= 2.0)) throw DomainError("r must lie in (0, 2]");
  std::vector<WeightDetail> out;
  for (std::size_t v = 0; v < ds.m(); ++v) {
    const auto& view = ds.views[v];
    Matrix E = view.x.data;
    E.noalias() -= s.U[v] * s.V.transpose();
    const double full = std::max(E.norm(), opt.floor);
    const double masked =
        std::max(residual_times_T(E, view.mask).norm(), opt.floor);
    WeightDetail d;
    d.unbounded = 0.5 * opt.r * std::pow(masked, 0.5 * opt.r - 1.0);
    d.boundary = (opt.half_boundary ? 0.5 : 1.0) / std::sqrt(full);
    d.w = opt.soft_boundary ? std::min(d.unbounded, d.boundary) : d.unbounded;
    out.push_back(d);
  }
  return out;
}

inline Vector update_weights(const MultiViewDataset& ds, const ModelState& s,
                             const WeightOptions& opt) {
  const auto details = weight_details(ds, s, opt);
  Vector w(details.size());
  for (std::size_t v = 0; v < details.size(); ++v) w[v] = details[v].w;
  return w;
}

inline Vector update_weights(const MultiViewDataset& ds, const ModelState& s,
                             double r) {
  WeightOptions opt;
  opt.r = r;
  return update_weights(ds, s, opt);
}

/// Step 1: per view, U M + N U = C with M = w V^T T V, N = alpha A A^T,
/// C = alpha A + w X T V.
inline std::vector<Matrix> update_U(const MultiViewDataset& ds,
                                    const ModelState& s,
                                    const Hyperparams& hp) {
  std::vector<Matrix> U;
  U.reserve(ds.m());
  for (std::size_t v = 0; v < ds.m(); ++v) {
    const auto& view = ds.views[v];
    const Matrix TV = view.mask.g().asDiagonal() * s.V;
    SylvesterProblem p;
    p.M = s.w[v] * (s.V.transpose() * TV);
    p.M = 0.5 * (p.M + p.M.transpose()).eval();
    p.N = hp.alpha * (s.A[v] * s.A[v].transpose());
    p.N = 0.5 * (p.N + p.N.transpose()).eval();
    p.C = hp.alpha * s.A[v] + s.w[v] * (view.x.data * TV);
    try {
      U.push_back(solve_sylvester(p));
    } catch (const SolverError& e) {
      throw SolverError("U step, view " + std::to_string(v) + ": " + e.what());
    }
  }
  return U;
}

/// Step 2: reweighted ridge. The theta-norm is majorized at the current A by
/// a quadratic whose curvature is half the gradient operator, so the solve
/// below never increases alpha ||A^T U - I||^2 + beta ||A||_theta.
inline std::vector<Matrix> update_A(const ModelState& s,
                                    const Hyperparams& hp) {
  std::vector<Matrix> A;
  A.reserve(s.A.size());
  for (std::size_t v = 0; v < s.A.size(); ++v) {
    ThetaDiag D = theta_diag(s.A[v], hp.theta_A, hp.epsilon_floor);
    D.diag *= 0.5;
    try {
      A.push_back(solve_A_woodbury(s.U[v], D, hp.alpha, hp.beta));
    } catch (const SolverError& e) {
      throw SolverError("A step, view " + std::to_string(v) + ": " + e.what());
    }
  }
  return A;
}

/// Step 3: multiplicative update of V with
///   Z1 = sum_v w_v (G (.) X)^T U,
///   Z2 = sum_v w_v (G (.) U V^T)^T U + alpha (D_V / 2) V.
inline Matrix update_V(const MultiViewDataset& ds, const ModelState& s,
                       const Hyperparams& hp) {
  Matrix Z1 = Matrix::Zero(s.V.rows(), s.V.cols());
  std::vector<QuadraticTerm> terms;
  for (std::size_t v = 0; v < ds.m(); ++v) {
    const auto& view = ds.views[v];
    const Vector rows = s.w[v] * view.mask.g();
    Z1.noalias() += rows.asDiagonal() * (view.x.data.transpose() * s.U[v]);
    terms.push_back({rows, s.U[v].transpose() * s.U[v]});
  }
  const Vector penalty =
      0.5 * hp.alpha * theta_diag(s.V, hp.theta_V, hp.epsilon_floor).diag;
  Matrix V = s.V;
  multiplicative_update(V, Z1, terms, penalty, hp.epsilon_floor);
  return V;
}

/// U <- U Q, V <- V Q^{-1} with Q the column sums of V; U V^T is unchanged.
inline ModelState normalize(ModelState s, double floor = 1e-12) {
  const Vector q = s.V.colwise().sum().transpose().cwiseMax(floor);
  for (auto& U : s.U) U = U * q.asDiagonal();
  s.V = s.V * q.cwiseInverse().asDiagonal();
  return s;
}

namespace detail {

template <class E>
[[noreturn]] void rethrow_at(const E& e, int iter) {
  throw E("iteration " + std::to_string(iter) + ": " + e.what());
}

inline TraceRecord make_record(const MultiViewDataset& ds,
                               const ModelState& s, const Hyperparams& hp,
                               int iter) {
  TraceRecord rec;
  rec.iter = iter;
  rec.objective = objective(ds, s, hp);
  rec.r_objective = r_objective(ds, s, hp);
  rec.w = s.w;
  for (std::size_t v = 0; v < ds.m(); ++v) {
    rec.residual_norms.push_back(
        masked_residual(ds.views[v].x.data, ds.views[v].mask, s.U[v], s.V)
            .norm());
  }
  return rec;
}

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo,
                             double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = u(rng);
  }
  return M;
}

}  // namespace detail

/// Initial state: w = 1/m (or the configured value), V ~ U(0.1, 1) seeded,
/// U from one U step against a small random A0, A from one A step whose
/// reweighting is evaluated at A0.
inline ModelState initialize(const MultiViewDataset& ds,
                             const AnimcConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const auto m = ds.m();
  ModelState s;
  s.w = Vector::Constant(static_cast<Eigen::Index>(m),
                         cfg.initial_weight.value_or(1.0 / static_cast<double>(m)));
  s.V = detail::uniform_matrix(ds.n(), ds.c, 0.1, 1.0, rng);
  for (std::size_t v = 0; v < m; ++v) {
    s.A.push_back(
        detail::uniform_matrix(ds.views[v].x.dims(), ds.c, 0.0, 0.01, rng));
    s.U.push_back(Matrix::Zero(ds.views[v].x.dims(), ds.c));
  }
  s.U = update_U(ds, s, cfg.hp);
  s.A = update_A(s, cfg.hp);
  return s;
}

inline FitResult fit(const MultiViewDataset& ds, const AnimcConfig& cfg) {
  validate_dataset(ds);
  cfg.hp.validate();
  if (ds.c < 2) throw DomainError("fit needs c >= 2");
  if (cfg.initial_weight && !(*cfg.initial_weight > 0.0)) {
    throw DomainError("initial weight must be positive");
  }
  const Hyperparams& hp = cfg.hp;
  WeightOptions wopt{hp.r, cfg.enable_soft_boundary, cfg.half_boundary,
                     hp.epsilon_floor};

  FitResult out;
  out.state = initialize(ds, cfg);
  out.trace.records.push_back(detail::make_record(ds, out.state, hp, 0));

  for (int it = 1; it <= hp.max_iter; ++it) {
    try {
      ModelState& s = out.state;
      s.U = update_U(ds, s, hp);
      s.A = update_A(s, hp);
      s.V = update_V(ds, s, hp);
      if (cfg.normalize) s = normalize(std::move(s), hp.epsilon_floor);
      if (!cfg.freeze_weights) s.w = update_weights(ds, s, wopt);
      out.trace.records.push_back(detail::make_record(ds, s, hp, it));
    } catch (const SolverError& e) {
      detail::rethrow_at(e, it);
    } catch (const NumericError& e) {
      detail::rethrow_at(e, it);
    }
    out.iterations = it;
    const auto& recs = out.trace.records;
    const double prev = recs[recs.size() - 2].objective;
    const double cur = recs.back().objective;
    if (std::abs(cur - prev) <= hp.rel_tol * std::max(std::abs(prev), 1e-300)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

inline Labels predict_labels(const Matrix& V, int c, LabelMode mode,
                             std::uint64_t seed, int restarts = 10) {
  if (mode == LabelMode::argmax) {
    Labels labels(V.rows());
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      Eigen::Index j = 0;
      V.row(i).maxCoeff(&j);
      labels[i] = static_cast<int>(j);
    }
    return labels;
  }
  return kmeans(V, c, restarts, seed).labels;
}

inline Labels predict_labels(const ModelState& s, int c, LabelMode mode,
                             std::uint64_t seed) {
  return predict_labels(s.V, c, mode, seed);
}

}  // namespace animc
