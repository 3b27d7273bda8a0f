#pragma once

#include <stdexcept>
#include <string>

namespace splr {

// Arguments violate a documented precondition (bad shape, non-finite entry,
// out-of-range parameter).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A matrix that must be positive definite is not; for the estimator this
// usually means a step was too large or the initialization was bad.
struct NotPositiveDefinite : std::runtime_error {
  NotPositiveDefinite() : std::runtime_error("matrix is not positive definite") {}
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

// Sample covariance is numerically singular (condition estimate beyond 1e12
// after any ridge). The caller must supply a larger ridge, or more samples.
struct CovarianceSingular : std::runtime_error {
  explicit CovarianceSingular(const std::string& what) : std::runtime_error(what) {}
};

// A hard-threshold budget too small to cover the exempted diagonal.
struct BudgetTooSmall : InputError {
  explicit BudgetTooSmall(const std::string& what) : InputError(what) {}
};

}  // namespace splr
