#pragma once

#include <Eigen/Cholesky>

#include "splr/types.hpp"

namespace splr {

// Sigma_hat = X^T X / n. No mean-centering: the model is zero-mean. Callers
// with uncentered real data subtract the column means first.
inline CovarianceEstimate sample_covariance(const Dataset& data) {
  const Matrix& x = data.samples();
  Matrix cov = (x.transpose() * x) / static_cast<double>(data.n());
  return CovarianceEstimate(cov);
}

namespace detail {

// Shared Cholesky of the assembled precision; throws NotPositiveDefinite on
// any factorization failure or nonpositive pivot.
struct PrecisionChol {
  Eigen::LLT<Matrix> llt;

  explicit PrecisionChol(const Matrix& omega) : llt(omega) {
    if (llt.info() != Eigen::Success ||
        !(llt.matrixLLT().diagonal().array() > 0.0).all())
      throw NotPositiveDefinite("assembled precision matrix is not positive definite");
  }

  double log_det() const {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }

  Matrix inverse() const {
    const Index d = llt.matrixLLT().rows();
    return llt.solve(Matrix::Identity(d, d));
  }
};

inline void check_dims(const CovarianceEstimate& cov, const Decomposition& dec) {
  if (cov.dim() != dec.dim())
    throw InputError("covariance and decomposition dimensions differ");
}

}  // namespace detail

// Negative log-likelihood up to constants: tr(Sigma_hat * Omega) - log|Omega|,
// with the log-determinant taken from the Cholesky diagonal.
inline double objective(const CovarianceEstimate& cov, const Decomposition& dec) {
  detail::check_dims(cov, dec);
  const Matrix omega = assemble_precision(dec);
  detail::PrecisionChol chol(omega);
  const double trace_term = cov.matrix().cwiseProduct(omega).sum();
  return trace_term - chol.log_det();
}

struct GradientPair {
  Matrix wrt_sparse;  // Sigma_hat - Omega^{-1}, symmetrized
  Matrix wrt_factor;  // 2 * sign * (Sigma_hat - Omega^{-1}) * Z
};

// Both partial gradients from one Cholesky solve. The inverse of Omega is the
// only O(d^3) object per iteration and is shared here.
inline GradientPair gradients(const CovarianceEstimate& cov,
                              const Decomposition& dec) {
  detail::check_dims(cov, dec);
  const Matrix omega = assemble_precision(dec);
  detail::PrecisionChol chol(omega);
  Matrix residual = symmetrized(cov.matrix() - chol.inverse());
  Matrix wrt_factor =
      2.0 * static_cast<double>(dec.sign()) * (residual * dec.factor());
  return {std::move(residual), std::move(wrt_factor)};
}

inline Matrix gradient_sparse(const CovarianceEstimate& cov,
                              const Decomposition& dec) {
  return gradients(cov, dec).wrt_sparse;
}

inline Matrix gradient_factor(const CovarianceEstimate& cov,
                              const Decomposition& dec) {
  return gradients(cov, dec).wrt_factor;
}

}  // namespace splr
