#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <optional>

#include "splr/rng.hpp"
#include "splr/spectral.hpp"
#include "splr/types.hpp"

namespace splr {

// Latent-variable model instance: a sparse positive definite joint precision
// over d observed + r latent variables, marginalized by Schur complement.
struct LvggmSpec {
  Index dim = 0;     // d, observed dimension
  Index latent = 0;  // r
  Index target_nnz = 0;  // target nonzeros of S*; 0 means round(0.02 d^2)
  std::uint64_t seed = 0;
  // Diagonal shift applied to the symmetrized draw; defaults to |lambda_min|+1
  // so the joint precision is strictly positive definite.
  std::optional<double> diag_boost;
};

// Generic sparse + low-rank instance (arbitrary PSD low-rank part).
struct GenericSpec {
  Index dim = 0;
  Index rank = 0;
  Index target_nnz = 0;  // 0 means round(0.05 d^2)
  std::uint64_t seed = 0;
  double pd_margin = 1.0;  // smallest eigenvalue of the assembled precision
  // Scale the factor by 1/sqrt(d) so ||L*||_2 stays O(1) across dimensions.
  // Disable for the unscaled draw.
  bool normalize_factor = true;
};

namespace detail {

// Stream ids, one per independent matrix draw.
enum StreamId : std::uint64_t {
  kSupportStream = 0,
  kValueStream = 1,
  kFactorStream = 2,
  kNoiseStream = 3,
};

inline Index default_nnz(Index target, Index dim, double fraction) {
  if (target > 0) return target;
  return std::max(
      dim,
      static_cast<Index>(std::llround(fraction * double(dim) * double(dim))));
}

// npairs distinct upper-triangle (i < j) positions with U[-1,1] values,
// mirrored into a symmetric d x d matrix.
inline Matrix sparse_symmetric_draw(Index d, Index npairs, RngStream& pos,
                                    RngStream& val) {
  Matrix out = Matrix::Zero(d, d);
  const std::uint64_t cells = std::uint64_t(d) * (d - 1) / 2;
  for (std::uint64_t flat : pos.distinct(cells, std::uint64_t(npairs))) {
    // unrank a flat upper-triangle index, row by row
    Index i = 0;
    std::uint64_t row_len = std::uint64_t(d) - 1;
    while (flat >= row_len) {
      flat -= row_len;
      --row_len;
      ++i;
    }
    const Index j = i + 1 + Index(flat);
    const double v = val.uniform(-1.0, 1.0);
    out(i, j) = v;
    out(j, i) = v;
  }
  return out;
}

}  // namespace detail

// Split a positive definite (d+r) x (d+r) joint precision by Schur
// complement over the observed block:
//   S* = joint_OO,  L* = -joint_OL joint_LL^{-1} joint_LO,  Omega* = S* + L*.
// L* is negative semidefinite, so the result carries sign = -1 and Z*
// factors -L*.
inline GroundTruth schur_split(const Matrix& joint, Index d, Index r) {
  if (joint.rows() != d + r || joint.cols() != d + r)
    throw InputError("schur_split: joint precision must be (d+r) x (d+r)");
  Matrix sparse = joint.topLeftCorner(d, d);
  const Matrix cross = joint.topRightCorner(d, r);
  Eigen::LLT<Matrix> latent_llt(Matrix(joint.bottomRightCorner(r, r)));
  if (latent_llt.info() != Eigen::Success)
    throw InputError("schur_split: latent block is not positive definite");
  Matrix coupling =
      symmetrized(cross * latent_llt.solve(cross.transpose()));  // PSD, rank <= r

  GroundTruth gt;
  gt.low_rank = -coupling;
  gt.precision = sparse + gt.low_rank;  // the Schur complement of a PD matrix
  gt.factor = detail::top_rank_factor(coupling, r).factor;
  gt.sparse = std::move(sparse);
  gt.sign = -1;
  gt.rank = r;
  gt.nnz_sparse = Index((gt.sparse.array() != 0.0).count());
  validate_ground_truth(gt);
  return gt;
}

// Latent-variable model instance: random sparse symmetric draw over the
// (d+r) x (d+r) upper triangle (observed-latent block dense), shifted by
// diag_boost so the joint precision is positive definite, then split by
// schur_split.
inline GroundTruth generate_lvggm(const LvggmSpec& spec) {
  const Index d = spec.dim, r = spec.latent;
  if (d < 2 || r < 1 || r >= d)
    throw InputError("generate_lvggm: need d >= 2 and 1 <= r < d");
  const Index target = detail::default_nnz(spec.target_nnz, d, 0.02);
  if (target < d)
    throw InputError("generate_lvggm: target_nnz must be >= d");

  RngStream pos(spec.seed, detail::kSupportStream);
  RngStream val(spec.seed, detail::kValueStream);
  RngStream fac(spec.seed, detail::kFactorStream);

  const Index total = d + r;
  const Index npairs = (target - d) / 2;  // diagonal becomes dense after the shift
  Matrix joint = Matrix::Zero(total, total);
  joint.topLeftCorner(d, d) = detail::sparse_symmetric_draw(d, npairs, pos, val);
  for (Index i = 0; i < d; ++i) {  // observed-latent block: dense
    for (Index j = d; j < total; ++j) {
      const double v = fac.uniform(-1.0, 1.0);
      joint(i, j) = v;
      joint(j, i) = v;
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(joint, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double boost = spec.diag_boost.value_or(std::abs(lmin) + 1.0);
  joint += boost * Matrix::Identity(total, total);
  return schur_split(joint, d, r);
}

// Arbitrary sparse + PSD low-rank instance: sparse symmetric draw plus an
// outer-product factor, with the diagonal shifted so the assembled precision
// has smallest eigenvalue pd_margin.
inline GroundTruth generate_generic(const GenericSpec& spec) {
  const Index d = spec.dim, r = spec.rank;
  if (d < 2 || r < 1 || r >= d)
    throw InputError("generate_generic: need d >= 2 and 1 <= r < d");
  if (spec.pd_margin <= 0)
    throw InputError("generate_generic: pd_margin must be > 0");
  const Index target = detail::default_nnz(spec.target_nnz, d, 0.05);
  if (target < d)
    throw InputError("generate_generic: target_nnz must be >= d");

  RngStream pos(spec.seed, detail::kSupportStream);
  RngStream val(spec.seed, detail::kValueStream);
  RngStream fac(spec.seed, detail::kFactorStream);

  const Index npairs = (target - d) / 2;
  Matrix sparse_raw = detail::sparse_symmetric_draw(d, npairs, pos, val);

  Matrix factor(d, r);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < r; ++j) factor(i, j) = fac.uniform(-1.0, 1.0);
  if (spec.normalize_factor) factor /= std::sqrt(double(d));

  GroundTruth gt;
  gt.low_rank = symmetrized(factor * factor.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sparse_raw + gt.low_rank,
                                           Eigen::EigenvaluesOnly);
  const double shift = std::abs(es.eigenvalues().minCoeff()) + spec.pd_margin;
  gt.sparse = sparse_raw + shift * Matrix::Identity(d, d);
  gt.precision = gt.sparse + gt.low_rank;
  gt.factor = std::move(factor);
  gt.sign = 1;
  gt.rank = r;
  gt.nnz_sparse = Index((gt.sparse.array() != 0.0).count());
  validate_ground_truth(gt);
  return gt;
}

// n i.i.d. draws from N(0, precision^{-1}): X_i = G zeta_i with G the
// Cholesky factor of the covariance. One noise stream, filled row by row.
inline Dataset sample_gaussian(const GroundTruth& truth, Index n,
                               std::uint64_t seed) {
  const Index d = truth.precision.rows();
  if (n < 2) throw InputError("sample_gaussian: need n >= 2");
  Eigen::LLT<Matrix> prec_llt(truth.precision);
  if (prec_llt.info() != Eigen::Success)
    throw InputError("sample_gaussian: precision is not positive definite");
  const Matrix covariance = symmetrized(prec_llt.solve(Matrix::Identity(d, d)));
  Eigen::LLT<Matrix> cov_llt(covariance);
  if (cov_llt.info() != Eigen::Success)
    throw InputError("sample_gaussian: covariance Cholesky failed");
  const Matrix g = cov_llt.matrixL();

  RngStream noise(seed, detail::kNoiseStream);
  Matrix samples(n, d);
  Vector zeta(d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) zeta(k) = noise.normal();
    samples.row(i) = (g * zeta).transpose();
  }
  return Dataset(std::move(samples));
}

}  // namespace splr
