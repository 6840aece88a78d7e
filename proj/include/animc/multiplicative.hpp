#pragma once

// Nonnegativity-preserving multiplicative step shared by semi-NMF,
// semi-RNMF and the ANIMC V update.
//
// Stationarity of a quadratic in V reads Z1 = Z2 with Z1 the linear
// (data) term and Z2 = sum_k L_k V R_k + P V, where L_k are nonnegative
// diagonal row weights (masks times view weights), R_k are symmetric c x c
// Gram matrices of mixed sign and P is a nonnegative diagonal penalty.
// The update is
//
//   V_ij <- V_ij sqrt( (Z1+ + Z2-)_ij / (Z1- + Z2+)_ij ).
//
// Z2 is split factor-wise, R = R+ - R-, so Z2+ = sum L V R+ + P V and
// Z2- = sum L V R-. This keeps the update a majorize-minimize step, and its
// fixed points are the same as those of the entrywise split of Z2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "animc/dataset.hpp"

namespace animc {

inline Matrix positive_part(const Matrix& B) {
  return (B.cwiseAbs() + B) * 0.5;
}

inline Matrix negative_part(const Matrix& B) {
  return (B.cwiseAbs() - B) * 0.5;
}

/// One term L V R of the quadratic part; `rows` holds diag(L).
struct QuadraticTerm {
  Vector rows;
  Matrix gram;
};

/// Applies the multiplicative update in place. `penalty` holds diag(P)
/// (may be empty for none). Denominators are floored at `floor`.
inline void multiplicative_update(Matrix& V, const Matrix& Z1,
                                  const std::vector<QuadraticTerm>& terms,
                                  const Vector& penalty, double floor) {
  Matrix num = positive_part(Z1);
  Matrix den = negative_part(Z1);
  for (const auto& t : terms) {
    const Matrix LV = t.rows.asDiagonal() * V;
    num.noalias() += LV * negative_part(t.gram);
    den.noalias() += LV * positive_part(t.gram);
  }
  if (penalty.size() > 0) den += penalty.asDiagonal() * V;
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      V(i, j) *= std::sqrt(num(i, j) / std::max(den(i, j), floor));
    }
  }
}

}  // namespace animc
