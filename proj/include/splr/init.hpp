#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>

#include "splr/optimizer.hpp"
#include "splr/spectral.hpp"
#include "splr/thresholding.hpp"
#include "splr/types.hpp"

namespace splr {

struct InitResult {
  Decomposition decomposition;
  // Top-r eigenvalues (signed, descending) of sign * (W - S0): the factor's
  // scale estimates consumed by estimate_scales.
  Vector residual_eigenvalues;
  double cov_lambda_max = 0.0;  // largest eigenvalue of the sample covariance
};

// Spectral initialization: W = (Sigma_hat + ridge I)^{-1}; S0 keeps the
// `budget` largest magnitudes of W; Z0 comes from the rank-r
// eigendecomposition of sign * (W - S0), keeping the r largest eigenvalues by
// signed value and clamping negatives to zero before the square root.
//
// The ridge is opt-in (default 0); a covariance whose condition estimate
// exceeds 1e12 even after the ridge raises CovarianceSingular rather than
// being repaired silently.
inline InitResult spectral_init(const CovarianceEstimate& cov, Index budget,
                                Index rank, int sign, double ridge = 0.0) {
  const Index d = cov.dim();
  if (rank < 1 || rank > d) throw InputError("spectral_init: rank out of range");
  if (sign != 1 && sign != -1) throw InputError("spectral_init: sign must be +-1");
  if (ridge < 0) throw InputError("spectral_init: ridge must be >= 0");

  Eigen::SelfAdjointEigenSolver<Matrix> es(
      cov.matrix() + ridge * Matrix::Identity(d, d));
  if (es.info() != Eigen::Success)
    throw InputError("spectral_init: eigendecomposition failed");
  const Vector& lambda = es.eigenvalues();  // ascending
  const double lmin = lambda(0), lmax = lambda(d - 1);
  if (lmin <= 0.0 || lmax / lmin > 1e12)
    throw CovarianceSingular(
        "sample covariance is numerically singular; supply a ridge or more"
        " samples");

  const Matrix w = symmetrized(es.eigenvectors() *
                               lambda.cwiseInverse().asDiagonal() *
                               es.eigenvectors().transpose());
  Matrix s0 = hard_threshold_sym(w, budget, /*keep_diagonal=*/false);
  const Matrix residual = double(sign) * (w - s0);
  detail::TopFactor top = detail::top_rank_factor(residual, rank);
  return {Decomposition(std::move(s0), std::move(top.factor), sign),
          std::move(top.eigenvalues), lmax - ridge};
}

// Data-driven scales for the theory-mode step sizes:
//   nu        = max(1, lambda_max(Sigma_hat))
//   sigma_max = top residual eigenvalue, clamped >= 1e-6
//   sigma_min = r-th residual eigenvalue, clamped >= 1e-6
inline StepSizePolicy estimate_scales(double cov_lambda_max,
                                      const Vector& residual_eigenvalues) {
  if (residual_eigenvalues.size() == 0)
    throw InputError("estimate_scales: no residual eigenvalues");
  StepSizePolicy policy;
  policy.nu = std::max(1.0, cov_lambda_max);
  policy.sigma_max = std::max(residual_eigenvalues(0), 1e-6);
  policy.sigma_min = std::max(
      residual_eigenvalues(residual_eigenvalues.size() - 1), 1e-6);
  return policy;
}

inline StepSizePolicy estimate_scales(const CovarianceEstimate& cov,
                                      const Vector& residual_eigenvalues) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov.matrix(), Eigen::EigenvaluesOnly);
  return estimate_scales(es.eigenvalues().maxCoeff(), residual_eigenvalues);
}

}  // namespace splr
