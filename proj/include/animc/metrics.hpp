#pragma once

// Clustering evaluation (ACC, NMI, Purity) and the seeded k-means used to
// turn latent rows into labels.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "animc/dataset.hpp"
#include "animc/errors.hpp"

namespace animc {

struct MetricBundle {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
};

namespace detail {

// Relabels arbitrary integer labels to 0..k-1 in order of first appearance.
inline std::vector<int> compact(const Labels& labels, int& k) {
  std::map<int, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = ids.emplace(l, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  k = static_cast<int>(ids.size());
  return out;
}

struct Contingency {
  Matrix counts;  // pred x truth
  double n = 0.0;
};

inline Contingency contingency(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size()) {
    throw DimensionError("label vectors differ in length: " +
                         std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()));
  }
  if (pred.empty()) throw ValidationError("empty label vectors");
  int kp = 0, kt = 0;
  const auto p = compact(pred, kp);
  const auto t = compact(truth, kt);
  Contingency out;
  out.counts = Matrix::Zero(kp, kt);
  for (std::size_t i = 0; i < p.size(); ++i) out.counts(p[i], t[i]) += 1.0;
  out.n = static_cast<double>(p.size());
  return out;
}

}  // namespace detail

/// Maximum-weight perfect assignment on a square matrix (Hungarian method,
/// O(k^3)). Returns the column assigned to each row.
inline std::vector<int> max_weight_assignment(const Matrix& weight) {
  const int k = static_cast<int>(weight.rows());
  if (weight.cols() != k) throw DimensionError("assignment needs a square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  // Shortest augmenting path on costs -weight, 1-based potentials.
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> p(k + 1, 0), way(k + 1, 0);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = -weight(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(k, -1);
  for (int j = 1; j <= k; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

/// Fraction of instances matched under the best one-to-one relabeling.
inline double accuracy(const Labels& pred, const Labels& truth) {
  const auto tab = detail::contingency(pred, truth);
  const Eigen::Index k = std::max(tab.counts.rows(), tab.counts.cols());
  Matrix square = Matrix::Zero(k, k);
  square.topLeftCorner(tab.counts.rows(), tab.counts.cols()) = tab.counts;
  const auto match = max_weight_assignment(square);
  double hit = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) hit += square(i, match[i]);
  return hit / tab.n;
}

/// Mutual information over sqrt(H(pred) H(truth)). Two single-cluster
/// partitions score 1; a single-cluster side against a varied one scores 0.
inline double nmi(const Labels& pred, const Labels& truth) {
  const auto tab = detail::contingency(pred, truth);
  const Vector rows = tab.counts.rowwise().sum() / tab.n;
  const Vector cols = tab.counts.colwise().sum().transpose() / tab.n;
  auto entropy = [](const Vector& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
    }
    return h;
  };
  const double hp = entropy(rows);
  const double ht = entropy(cols);
  if (hp <= 0.0 && ht <= 0.0) return 1.0;
  if (hp <= 0.0 || ht <= 0.0) return 0.0;
  double mi = 0.0;
  for (Eigen::Index i = 0; i < tab.counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < tab.counts.cols(); ++j) {
      const double pij = tab.counts(i, j) / tab.n;
      if (pij > 0.0) mi += pij * std::log(pij / (rows[i] * cols[j]));
    }
  }
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

inline double purity(const Labels& pred, const Labels& truth) {
  const auto tab = detail::contingency(pred, truth);
  return tab.counts.rowwise().maxCoeff().sum() / tab.n;
}

inline MetricBundle evaluate(const Labels& pred, const Labels& truth) {
  return {accuracy(pred, truth), nmi(pred, truth), purity(pred, truth)};
}

struct KMeansResult {
  Labels labels;
  Matrix centroids;  // k x dim
  double wcss = 0.0;
};

namespace detail {

inline double sq_dist(const Matrix& X, Eigen::Index i, const Matrix& C,
                      Eigen::Index j) {
  return (X.row(i) - C.row(j)).squaredNorm();
}

// k-means++ seeding. Falls back to uniform picks among unchosen points when
// all remaining distances are zero (duplicate points).
inline Matrix seed_centroids(const Matrix& X, int k, std::mt19937_64& rng) {
  const Eigen::Index n = X.rows();
  Matrix C(k, X.cols());
  std::vector<char> chosen(n, 0);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::Index first = pick(rng);
  C.row(0) = X.row(first);
  chosen[first] = 1;
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = sq_dist(X, i, C, 0);
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index next = -1;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] <= 0.0) continue;
        next = i;
        target -= d2[i];
        if (target <= 0.0) break;
      }
    }
    if (next < 0) {
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> f(0, free.size() - 1);
      next = free[f(rng)];
    }
    chosen[next] = 1;
    C.row(j) = X.row(next);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(X, i, C, j));
    }
  }
  return C;
}

inline KMeansResult lloyd(const Matrix& X, Matrix C, int max_iter,
                          std::mt19937_64& rng) {
  const Eigen::Index n = X.rows();
  const int k = static_cast<int>(C.rows());
  Labels labels(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(X, i, C, 0);
      for (int j = 1; j < k; ++j) {
        const double d = sq_dist(X, i, C, j);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(k, X.cols());
    std::vector<Eigen::Index> size(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += X.row(i);
      ++size[labels[i]];
    }
    for (int j = 0; j < k; ++j) {
      if (size[j] > 0) {
        C.row(j) = sums.row(j) / static_cast<double>(size[j]);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centroid.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = sq_dist(X, i, C, labels[i]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d <= 0.0) {
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        far = pick(rng);
      }
      C.row(j) = X.row(far);
      labels[far] = j;
      changed = true;
    }
    if (!changed) break;
  }
  KMeansResult out{labels, C, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) out.wcss += sq_dist(X, i, C, labels[i]);
  return out;
}

}  // namespace detail

/// k-means on the rows of `points`; the restart with the lowest
/// within-cluster sum of squares wins.
inline KMeansResult kmeans(const Matrix& points, int k, int restarts,
                           std::uint64_t seed, int max_iter = 300) {
  if (k <= 0 || k > points.rows()) {
    throw DomainError("kmeans needs 1 <= k <= n (k=" + std::to_string(k) +
                      ", n=" + std::to_string(points.rows()) + ")");
  }
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Matrix C = detail::seed_centroids(points, k, rng);
    KMeansResult res = detail::lloyd(points, std::move(C), max_iter, rng);
    if (res.wcss < best.wcss) best = std::move(res);
  }
  return best;
}

}  // namespace animc
