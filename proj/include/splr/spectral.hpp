#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>

#include "splr/types.hpp"

namespace splr {
namespace detail {

// Fix each column's sign so its largest-magnitude entry is positive (first
// such index on ties). Eigenvector signs are otherwise arbitrary; pinning
// them keeps factor output deterministic.
inline void sign_normalize_columns(Matrix& u) {
  for (Index c = 0; c < u.cols(); ++c) {
    Index imax = 0;
    u.col(c).cwiseAbs().maxCoeff(&imax);
    if (u(imax, c) < 0.0) u.col(c) = -u.col(c);
  }
}

struct TopFactor {
  Matrix factor;      // U_r * diag(sqrt(max(lambda, 0)))
  Vector eigenvalues; // the r retained eigenvalues, signed, descending
};

// Rank-r factor of a symmetric matrix from its eigendecomposition, keeping
// the r largest eigenvalues by signed value and clamping negatives to zero
// before the square root.
inline TopFactor top_rank_factor(const Matrix& m, Index r) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
  if (es.info() != Eigen::Success)
    throw InputError("top_rank_factor: eigendecomposition failed");
  const Index d = m.rows();
  Vector kept(r);
  Matrix u(d, r);
  for (Index k = 0; k < r; ++k) {
    kept(k) = es.eigenvalues()(d - 1 - k);  // Eigen sorts ascending
    u.col(k) = es.eigenvectors().col(d - 1 - k);
  }
  sign_normalize_columns(u);
  Matrix factor = u * kept.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return {std::move(factor), std::move(kept)};
}

}  // namespace detail
}  // namespace splr
