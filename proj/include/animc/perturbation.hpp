#pragma once

// Synthetic multi-view data and the missing/noise protocol applied to it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "animc/dataset.hpp"
#include "animc/errors.hpp"

namespace animc {

struct SynthSpec {
  Eigen::Index n = 200;
  int m = 2;
  int c = 4;
  std::vector<Eigen::Index> dims{100, 150};
  double separation = 5.0;
  // Standard deviation of the per-view isotropic noise.
  double noise = 1.0;
  std::uint64_t seed = 0;
};

namespace detail {

// floor(rate * count) robust to products like 0.3 * 200 = 59.999...
inline Eigen::Index fraction_count(double rate, Eigen::Index count) {
  return static_cast<Eigen::Index>(
      std::floor(rate * static_cast<double>(count) + 1e-9));
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = g(rng);
  }
  return M;
}

// Random rows x cols matrix with orthonormal columns (rows >= cols).
inline Matrix orthonormal_columns(Eigen::Index rows, Eigen::Index cols,
                                  std::mt19937_64& rng) {
  const Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rows, cols, rng));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

}  // namespace detail

/// Gaussian clusters around a shared latent centroid set, seen through
/// per-view linear maps.
///
/// Latent centroids are `separation` times an orthonormal frame of R^c, so
/// every pair sits separation * sqrt(2) apart. View v maps them with P_v
/// (d_v x c, orthonormal columns when d_v >= c, hence distance preserving)
/// and each instance adds independent N(0, noise^2) to every feature.
/// Cluster sizes are floor(n/c), the remainder going to the first clusters.
inline MultiViewDataset synth_generate(const SynthSpec& spec) {
  if (static_cast<int>(spec.dims.size()) != spec.m) {
    throw DimensionError("dims has " + std::to_string(spec.dims.size()) +
                         " entries for " + std::to_string(spec.m) + " views");
  }
  if (spec.m <= 0 || spec.c <= 0 || spec.n < spec.c) {
    throw DomainError("synth_generate needs m > 0 and n >= c > 0");
  }
  for (auto d : spec.dims) {
    if (d <= 0) throw DomainError("view dimensions must be positive");
  }
  if (!(spec.separation >= 0.0) || !(spec.noise >= 0.0)) {
    throw DomainError("separation and noise must be nonnegative");
  }

  std::mt19937_64 rng(spec.seed);
  const int c = spec.c;
  const Eigen::Index n = spec.n;

  Labels labels(n);
  const Eigen::Index base = n / c;
  const Eigen::Index extra = n % c;
  Eigen::Index pos = 0;
  for (int k = 0; k < c; ++k) {
    const Eigen::Index size = base + (k < extra ? 1 : 0);
    for (Eigen::Index i = 0; i < size; ++i) labels[pos++] = k;
  }

  const Matrix centroids = spec.separation * detail::orthonormal_columns(c, c, rng);

  MultiViewDataset ds;
  ds.name = "synthetic";
  ds.c = c;
  ds.labels = labels;
  for (int v = 0; v < spec.m; ++v) {
    const Eigen::Index d = spec.dims[v];
    const Matrix view_centroids =
        detail::orthonormal_columns(std::max<Eigen::Index>(d, c), c, rng)
            .topRows(d) *
        centroids;
    Matrix X = spec.noise * detail::gaussian_matrix(d, n, rng);
    for (Eigen::Index i = 0; i < n; ++i) X.col(i) += view_centroids.col(labels[i]);
    View view;
    view.x = {std::move(X), "view" + std::to_string(v)};
    view.mask = build_presence(Vector::Ones(n), d);
    ds.views.push_back(std::move(view));
  }
  return ds;
}

struct MissingReport {
  std::vector<Eigen::Index> removed;  // per view
  Eigen::Index repairs = 0;
};

/// Marks floor(per * n) present instances absent in each view and zeroes
/// their columns. An instance left absent from every view is restored in a
/// random view, which then drops a replacement that stays covered elsewhere
/// when one exists.
inline MultiViewDataset apply_missing(const MultiViewDataset& in, double per,
                                      std::uint64_t seed,
                                      MissingReport* report = nullptr) {
  if (!(per >= 0.0 && per <= 0.9)) {
    throw ValidationError("missing rate must lie in [0, 0.9]");
  }
  MultiViewDataset ds = in;
  const Eigen::Index n = ds.n();
  const auto m = static_cast<Eigen::Index>(ds.m());
  const Eigen::Index k = detail::fraction_count(per, n);
  MissingReport rep;
  rep.removed.assign(ds.m(), 0);
  if (k == 0) {
    if (report) *report = rep;
    return ds;
  }
  if (k * m > n * (m - 1)) {
    throw ValidationError("missing rate " + std::to_string(per) +
                          " cannot keep every instance in some view");
  }

  std::mt19937_64 rng(seed);
  std::vector<Vector> g;
  for (const auto& view : ds.views) g.push_back(view.mask.g());
  for (Eigen::Index v = 0; v < m; ++v) {
    std::vector<Eigen::Index> present;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (g[v][i] != 0.0) present.push_back(i);
    }
    if (static_cast<Eigen::Index>(present.size()) < k) {
      throw ValidationError("view " + std::to_string(v) +
                            " has fewer present instances than requested");
    }
    std::shuffle(present.begin(), present.end(), rng);
    for (Eigen::Index t = 0; t < k; ++t) g[v][present[t]] = 0.0;
    rep.removed[v] = k;
  }

  auto coverage = [&](Eigen::Index i) {
    double s = 0.0;
    for (Eigen::Index v = 0; v < m; ++v) s += g[v][i];
    return s;
  };
  std::uniform_int_distribution<Eigen::Index> pick_view(0, m - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (coverage(i) > 0.0) continue;
    const Eigen::Index v = pick_view(rng);
    g[v][i] = 1.0;
    ++rep.repairs;
    std::vector<Eigen::Index> swap;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && g[v][j] != 0.0 && coverage(j) >= 2.0 &&
          in.views[v].mask.present(j)) {
        swap.push_back(j);
      }
    }
    if (swap.empty()) {
      --rep.removed[v];
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, swap.size() - 1);
    g[v][swap[pick(rng)]] = 0.0;
  }

  for (Eigen::Index v = 0; v < m; ++v) {
    auto& view = ds.views[v];
    view.x.data = view.x.data * g[v].asDiagonal();
    view.mask = build_presence(g[v], view.x.dims());
  }
  if (report) *report = rep;
  return ds;
}

enum class NoiseUnit { entries, instances };

struct NoiseSpec {
  double rate = 0.2;
  double variance = 0.1;
  bool normalize_first = true;
  NoiseUnit unit = NoiseUnit::entries;
  std::uint64_t seed = 0;
};

/// Scales every view to unit max-abs entry (optional), then adds
/// N(0, variance) to a `rate` fraction of the present entries (or of the
/// present instances, all features) of each view. Absent columns stay zero.
inline MultiViewDataset add_gaussian_noise(const MultiViewDataset& in,
                                           const NoiseSpec& spec) {
  if (!(spec.variance >= 0.0)) throw DomainError("noise variance must be >= 0");
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) {
    throw DomainError("noise rate must lie in [0, 1]");
  }
  MultiViewDataset ds = in;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(spec.variance));
  for (auto& view : ds.views) {
    Matrix& X = view.x.data;
    if (spec.normalize_first) {
      const double peak = X.cwiseAbs().maxCoeff();
      if (peak > 0.0) X /= peak;
    }
    if (spec.variance == 0.0 || spec.rate == 0.0) continue;
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < X.cols(); ++i) {
      if (view.mask.present(i)) cols.push_back(i);
    }
    if (spec.unit == NoiseUnit::instances) {
      std::shuffle(cols.begin(), cols.end(), rng);
      const auto count =
          detail::fraction_count(spec.rate, static_cast<Eigen::Index>(cols.size()));
      for (Eigen::Index t = 0; t < count; ++t) {
        for (Eigen::Index r = 0; r < X.rows(); ++r) X(r, cols[t]) += noise(rng);
      }
      continue;
    }
    std::vector<Eigen::Index> cells;
    cells.reserve(cols.size() * X.rows());
    for (auto col : cols) {
      for (Eigen::Index r = 0; r < X.rows(); ++r) cells.push_back(col * X.rows() + r);
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    const auto count =
        detail::fraction_count(spec.rate, static_cast<Eigen::Index>(cells.size()));
    for (Eigen::Index t = 0; t < count; ++t) X.data()[cells[t]] += noise(rng);
  }
  return ds;
}

}  // namespace animc
