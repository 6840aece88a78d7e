#pragma once

// Multi-view data model: view matrices, per-view presence indicators, model
// state and the masked residual arithmetic shared by every solver.
//
// A view is stored features x instances (d_v x n). Absent instances are kept
// as zero columns so all views stay rectangular; the presence vector g is the
// only source of truth for which columns count.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "animc/errors.hpp"

namespace animc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

struct ViewMatrix {
  Matrix data;  // d_v x n
  std::string name;

  Eigen::Index dims() const { return data.rows(); }
  Eigen::Index instances() const { return data.cols(); }
};

/// Presence indicator of one view. g_i = 1 when instance i is observed.
///
/// The d_v x n indicator G (constant columns) and the n x n diagonal T are
/// derivable from g; only g is stored and masking is done as E * diag(g).
class PresenceMask {
 public:
  PresenceMask() = default;

  PresenceMask(Vector g, Eigen::Index dims) : g_(std::move(g)), dims_(dims) {
    if (dims_ <= 0) throw ValidationError("presence mask needs d_v > 0");
    for (Eigen::Index i = 0; i < g_.size(); ++i) {
      if (g_[i] != 0.0 && g_[i] != 1.0) {
        throw ValidationError("presence entry " + std::to_string(i) +
                              " is not binary");
      }
    }
  }

  const Vector& g() const { return g_; }
  Eigen::Index dims() const { return dims_; }
  Eigen::Index size() const { return g_.size(); }
  bool present(Eigen::Index i) const { return g_[i] != 0.0; }
  Eigen::Index present_count() const {
    return static_cast<Eigen::Index>(g_.sum());
  }
  double missing_rate() const {
    return size() == 0 ? 0.0 : 1.0 - g_.mean();
  }

  /// Materialized G (d_v x n). Only needed by oracles and diagnostics.
  Matrix indicator() const { return g_.transpose().replicate(dims_, 1); }

  /// Materialized T = diag(g) (n x n).
  Matrix diagonal() const { return g_.asDiagonal(); }

 private:
  Vector g_;
  Eigen::Index dims_ = 0;
};

/// Builds a presence mask from a 0/1 vector.
inline PresenceMask build_presence(const Vector& g, Eigen::Index dims) {
  return PresenceMask(g, dims);
}

struct View {
  ViewMatrix x;
  PresenceMask mask;
};

struct MultiViewDataset {
  std::string name;
  std::vector<View> views;
  std::optional<Labels> labels;
  int c = 0;

  std::size_t m() const { return views.size(); }
  Eigen::Index n() const {
    return views.empty() ? 0 : views.front().x.instances();
  }
};

struct ModelState {
  std::vector<Matrix> U;  // d_v x c per view
  std::vector<Matrix> A;  // d_v x c per view
  Matrix V;               // n x c, entrywise >= 0
  Vector w;               // m view weights, > 0
};

struct Hyperparams {
  double alpha = 0.1;
  double beta = 10.0;
  double r = 0.2;
  double theta_V = 0.01;
  double theta_A = 100.0;
  int max_iter = 40;
  double rel_tol = 1e-6;
  double epsilon_floor = 1e-12;

  void validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0)) {
      throw DomainError("alpha and beta must be nonnegative");
    }
    if (!(r > 0.0 && r <= 2.0)) throw DomainError("r must lie in (0, 2]");
    if (!(theta_V > 0.0) || !(theta_A > 0.0)) {
      throw DomainError("theta values must be positive");
    }
    if (max_iter <= 0) throw DomainError("max_iter must be positive");
    if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
    if (!(epsilon_floor > 0.0)) {
      throw DomainError("epsilon_floor must be positive");
    }
  }
};

/// E * T: zeroes the columns of absent instances. Equal to G (.) E exactly.
inline Matrix residual_times_T(const Matrix& E, const PresenceMask& mask) {
  if (E.cols() != mask.size()) {
    throw DimensionError("residual " + detail::shape(E.rows(), E.cols()) +
                         " vs mask of length " + std::to_string(mask.size()));
  }
  return E * mask.g().asDiagonal();
}

/// G (.) (X - U V^T).
inline Matrix masked_residual(const Matrix& X, const PresenceMask& mask,
                              const Matrix& U, const Matrix& V) {
  if (U.rows() != X.rows() || V.rows() != X.cols() || U.cols() != V.cols()) {
    throw DimensionError("masked_residual: X " +
                         detail::shape(X.rows(), X.cols()) + ", U " +
                         detail::shape(U.rows(), U.cols()) + ", V " +
                         detail::shape(V.rows(), V.cols()));
  }
  Matrix E = X;
  E.noalias() -= U * V.transpose();
  return residual_times_T(E, mask);
}

struct ValidationReport {
  Eigen::Index n = 0;
  std::size_t m = 0;
  std::vector<Eigen::Index> dims;
  std::vector<double> missing_rates;
  bool has_labels = false;
};

/// Checks structural consistency and coverage. Throws ValidationError.
inline ValidationReport validate_dataset(const MultiViewDataset& ds) {
  if (ds.views.empty()) throw ValidationError("dataset has no views");
  ValidationReport rep;
  rep.n = ds.n();
  rep.m = ds.m();
  Vector coverage = Vector::Zero(rep.n);
  for (std::size_t v = 0; v < ds.m(); ++v) {
    const auto& view = ds.views[v];
    if (view.x.instances() != rep.n) {
      throw ValidationError("view " + std::to_string(v) + " has " +
                            std::to_string(view.x.instances()) +
                            " instances, expected " + std::to_string(rep.n));
    }
    if (view.mask.size() != rep.n || view.mask.dims() != view.x.dims()) {
      throw ValidationError("view " + std::to_string(v) +
                            " presence mask does not match its matrix");
    }
    if (!view.x.data.allFinite()) {
      throw ValidationError("view " + std::to_string(v) +
                            " contains non-finite entries");
    }
    coverage += view.mask.g();
    rep.dims.push_back(view.x.dims());
    rep.missing_rates.push_back(view.mask.missing_rate());
  }
  for (Eigen::Index i = 0; i < rep.n; ++i) {
    if (coverage[i] == 0.0) {
      throw ValidationError("instance " + std::to_string(i) +
                            " is absent from every view");
    }
  }
  if (ds.c <= 0) throw ValidationError("cluster count must be positive");
  if (ds.labels) {
    if (static_cast<Eigen::Index>(ds.labels->size()) != rep.n) {
      throw ValidationError("label vector length differs from n");
    }
    for (int l : *ds.labels) {
      if (l < 0 || l >= ds.c) {
        throw ValidationError("label " + std::to_string(l) +
                              " outside [0, c)");
      }
    }
    rep.has_labels = true;
  }
  return rep;
}

/// Shape check of a model state against a dataset.
inline void check_state(const MultiViewDataset& ds, const ModelState& s) {
  const auto m = ds.m();
  if (s.U.size() != m || s.A.size() != m ||
      static_cast<std::size_t>(s.w.size()) != m) {
    throw DimensionError("state holds a different number of views");
  }
  const Eigen::Index c = s.V.cols();
  if (s.V.rows() != ds.n()) throw DimensionError("V row count differs from n");
  for (std::size_t v = 0; v < m; ++v) {
    const Eigen::Index d = ds.views[v].x.dims();
    if (s.U[v].rows() != d || s.U[v].cols() != c || s.A[v].rows() != d ||
        s.A[v].cols() != c) {
      throw DimensionError("view " + std::to_string(v) +
                           " factor shapes do not conform");
    }
  }
}

}  // namespace animc
