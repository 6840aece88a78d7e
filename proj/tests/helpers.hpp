#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "animc/dataset.hpp"

namespace animc::fixtures {

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = g(rng);
  return M;
}

inline Matrix uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = u(rng);
  return M;
}

inline Matrix random_spd(Eigen::Index k, std::mt19937_64& rng) {
  const Matrix B = gaussian(k, k, rng);
  return B * B.transpose() + 0.5 * Matrix::Identity(k, k);
}

// Random dataset with a random coverage-preserving mask per view.
inline MultiViewDataset random_dataset(std::mt19937_64& rng, Eigen::Index n,
                                       std::vector<Eigen::Index> dims, int c,
                                       double absent = 0.3) {
  MultiViewDataset ds;
  ds.name = "random";
  ds.c = c;
  const auto m = dims.size();
  std::vector<Vector> g(m, Vector::Ones(n));
  std::bernoulli_distribution drop(absent);
  std::uniform_int_distribution<std::size_t> keep(0, m - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t kept = keep(rng);
    for (std::size_t v = 0; v < m; ++v) {
      if (v != kept && drop(rng)) g[v][i] = 0.0;
    }
  }
  for (std::size_t v = 0; v < m; ++v) {
    View view;
    view.x = {gaussian(dims[v], n, rng) * g[v].asDiagonal(), "v" + std::to_string(v)};
    view.mask = build_presence(g[v], dims[v]);
    ds.views.push_back(std::move(view));
  }
  return ds;
}

inline ModelState random_state(const MultiViewDataset& ds, std::mt19937_64& rng) {
  ModelState s;
  for (const auto& view : ds.views) {
    s.U.push_back(gaussian(view.x.dims(), ds.c, rng));
    s.A.push_back(0.3 * gaussian(view.x.dims(), ds.c, rng));
  }
  s.V = uniform(ds.n(), ds.c, 0.05, 1.0, rng);
  s.w = uniform(static_cast<Eigen::Index>(ds.m()), 1, 0.2, 2.0, rng);
  return s;
}

}  // namespace animc::fixtures
