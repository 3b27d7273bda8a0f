#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "splr/errors.hpp"

namespace splr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline Matrix symmetrized(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

// n x d sample matrix, one observation per row.
class Dataset {
 public:
  explicit Dataset(Matrix samples) : samples_(std::move(samples)) {
    if (samples_.rows() < 2 || samples_.cols() < 2)
      throw InputError("Dataset requires n >= 2 and d >= 2");
    if (!samples_.allFinite())
      throw InputError("Dataset contains non-finite entries");
  }

  const Matrix& samples() const { return samples_; }
  Index n() const { return samples_.rows(); }
  Index d() const { return samples_.cols(); }

 private:
  Matrix samples_;
};

// Symmetric d x d sample covariance; symmetrized on construction.
class CovarianceEstimate {
 public:
  explicit CovarianceEstimate(const Matrix& m) {
    if (m.rows() != m.cols())
      throw InputError("covariance must be square");
    if (!m.allFinite())
      throw InputError("covariance contains non-finite entries");
    matrix_ = symmetrized(m);
    if ((matrix_.diagonal().array() < 0.0).any())
      throw InputError("covariance has a negative diagonal entry");
  }

  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

 private:
  Matrix matrix_;
};

// Estimator state for the precision matrix Omega = S + sign * Z Z^T, with S
// the symmetric sparse part and Z the d x r low-rank factor. The sign lets
// the same machinery fit factors of either sign-definiteness.
class Decomposition {
 public:
  Decomposition(const Matrix& sparse, Matrix factor, int sign)
      : factor_(std::move(factor)), sign_(sign) {
    if (sparse.rows() != sparse.cols())
      throw InputError("sparse part must be square");
    if (factor_.rows() != sparse.rows())
      throw InputError("factor row count must match sparse dimension");
    if (factor_.cols() < 1 || factor_.cols() > sparse.rows())
      throw InputError("factor rank must satisfy 1 <= r <= d");
    if (sign != 1 && sign != -1)
      throw InputError("sign must be +1 or -1");
    if (!sparse.allFinite() || !factor_.allFinite())
      throw InputError("decomposition contains non-finite entries");
    sparse_ = symmetrized(sparse);
  }

  const Matrix& sparse() const { return sparse_; }
  const Matrix& factor() const { return factor_; }
  int sign() const { return sign_; }
  Index dim() const { return sparse_.rows(); }
  Index rank() const { return factor_.cols(); }

  // The assembled low-rank part sign * Z Z^T, exactly symmetric.
  Matrix low_rank() const {
    return symmetrized(double(sign_) * (factor_ * factor_.transpose()));
  }

 private:
  Matrix sparse_;
  Matrix factor_;
  int sign_;
};

// Omega = S + sign * Z Z^T, symmetrized after the rank-r product.
inline Matrix assemble_precision(const Decomposition& dec) {
  return symmetrized(dec.sparse() + dec.low_rank());
}

// True iff a Cholesky factorization succeeds with all pivots > 0.
inline bool is_positive_definite(const Matrix& m) {
  if (!m.allFinite())
    throw InputError("is_positive_definite: non-finite entries");
  if (m.rows() != m.cols())
    throw InputError("is_positive_definite: matrix must be square");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  return (llt.matrixLLT().diagonal().array() > 0.0).all();
}

// Generator output: the planted decomposition an estimator is judged
// against. `factor` (when present) satisfies factor * factor^T = sign *
// low_rank with sign * low_rank positive semidefinite.
struct GroundTruth {
  Matrix sparse;                 // S*
  Matrix low_rank;               // L*, any sign-definiteness
  Matrix precision;              // Omega* = S* + L*, positive definite
  std::optional<Matrix> factor;  // Z*
  int sign = 1;
  Index nnz_sparse = 0;  // nonzero count of S* over the full matrix
  Index rank = 0;        // rank of L*
};

inline void validate_ground_truth(const GroundTruth& gt) {
  const Index d = gt.sparse.rows();
  if (gt.low_rank.rows() != d || gt.precision.rows() != d)
    throw InputError("ground truth shape mismatch");
  if ((gt.sparse + gt.low_rank - gt.precision).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("ground truth violates precision = sparse + low_rank");
  if (!is_positive_definite(gt.precision))
    throw InputError("ground truth precision is not positive definite");
  Eigen::JacobiSVD<Matrix> svd(gt.low_rank);
  const Vector sv = svd.singularValues();
  if (gt.rank < 1 || gt.rank > d)
    throw InputError("ground truth rank out of range");
  if (gt.rank < d && sv(gt.rank) > 1e-8 * sv(0))
    throw InputError("ground truth low_rank exceeds declared rank");
}

enum class UpdateRule {
  simultaneous,  // both gradients at the old iterate, as specified
  sequential     // comparison-only variant: factor gradient at the new S
};

struct FitConfig {
  Index sparsity = 0;       // s: nonzero budget over the full matrix
  Index rank = 1;           // r
  double step_sparse = 0;   // step size for S
  double step_factor = 0;   // step size for Z
  Index max_iters = 200;    // T
  int sign = 1;
  bool keep_diagonal = false;
  bool backtrack = true;
  double tol = 1e-7;  // relative objective change; 0 disables early stopping
  UpdateRule update_rule = UpdateRule::simultaneous;
};

struct TraceRecord {
  Index iteration = 0;
  double objective = 0.0;
  std::optional<double> err_sparse;     // ||S - S*||_F
  std::optional<double> err_low_rank;   // ||L - L*||_F
  std::optional<double> err_precision;  // ||Omega - Omega*||_F
  double time_ms = 0.0;                 // wall time since the fit started
};

using FitTrace = std::vector<TraceRecord>;

// The iterate left the positive definite cone and backtracking (if enabled)
// could not repair it. Carries the trace accumulated before the failure.
struct StepFailure : std::runtime_error {
  explicit StepFailure(const std::string& what, FitTrace t = {})
      : std::runtime_error(what), trace(std::move(t)) {}
  FitTrace trace;
};

}  // namespace splr
