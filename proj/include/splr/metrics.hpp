#pragma once

#include <Eigen/SVD>
#include <cmath>

#include "splr/thresholding.hpp"
#include "splr/types.hpp"

namespace splr {

inline double frobenius_error(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InputError("frobenius_error: shape mismatch");
  return (a - b).norm();
}

// Rotation-invariant distance between factors:
//   d(Z, Zref) = min over orthogonal U of ||Z - Zref U||_F
//             = sqrt(||Z||_F^2 + ||Zref||_F^2 - 2 ||Zref^T Z||_*)
// closed-form via the nuclear norm of the r x r cross product.
inline double procrustes_distance(const Matrix& z, const Matrix& z_ref) {
  if (z.rows() != z_ref.rows() || z.cols() != z_ref.cols())
    throw InputError("procrustes_distance: shape mismatch");
  Eigen::JacobiSVD<Matrix> svd(z_ref.transpose() * z);
  const double nuclear = svd.singularValues().sum();
  const double sq = z.squaredNorm() + z_ref.squaredNorm() - 2.0 * nuclear;
  return std::sqrt(std::max(sq, 0.0));
}

struct ProcrustesResult {
  double distance;
  Matrix rotation;  // the minimizing orthogonal U
};

// Same distance plus the optimal rotation, recovered from the polar factor
// of Zref^T Z.
inline ProcrustesResult procrustes_align(const Matrix& z, const Matrix& z_ref) {
  if (z.rows() != z_ref.rows() || z.cols() != z_ref.cols())
    throw InputError("procrustes_align: shape mismatch");
  Eigen::JacobiSVD<Matrix> svd(z_ref.transpose() * z,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double nuclear = svd.singularValues().sum();
  const double sq = z.squaredNorm() + z_ref.squaredNorm() - 2.0 * nuclear;
  return {std::sqrt(std::max(sq, 0.0)),
          svd.matrixU() * svd.matrixV().transpose()};
}

// Spikiness ratio d * ||L||_inf / ||L||_F: how concentrated the mass of L is.
// d * max for a rank-one spike, ~1 for a flat matrix.
inline double spikiness(const Matrix& l) {
  if (l.rows() != l.cols()) throw InputError("spikiness: matrix must be square");
  const double fro = l.norm();
  if (fro == 0.0) throw InputError("spikiness: undefined for the zero matrix");
  return static_cast<double>(l.rows()) * l.cwiseAbs().maxCoeff() / fro;
}

struct SupportMetrics {
  double precision;
  double recall;
  double f1;
};

// Edge-recovery quality over off-diagonal supports at tolerance tol.
// Empty-vs-empty counts as perfect (vacuous truth).
inline SupportMetrics support_metrics(const Matrix& estimate,
                                      const Matrix& truth, double tol) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw InputError("support_metrics: shape mismatch");
  Index predicted = 0, actual = 0, hit = 0;
  for (Index i = 0; i < truth.rows(); ++i) {
    for (Index j = i + 1; j < truth.cols(); ++j) {
      const bool p = std::abs(estimate(i, j)) > tol;
      const bool a = std::abs(truth(i, j)) > tol;
      predicted += p;
      actual += a;
      hit += (p && a);
    }
  }
  const double precision = predicted == 0 ? 1.0 : double(hit) / double(predicted);
  const double recall = actual == 0 ? 1.0 : double(hit) / double(actual);
  const double f1 = (precision + recall) == 0.0
                        ? 0.0
                        : 2.0 * precision * recall / (precision + recall);
  return {precision, recall, f1};
}

// Default tolerance for support comparisons: hard-thresholded iterates are
// exactly sparse but convex baselines are not.
inline double default_support_tol(const Matrix& truth) {
  return 1e-6 * truth.cwiseAbs().maxCoeff();
}

}  // namespace splr
