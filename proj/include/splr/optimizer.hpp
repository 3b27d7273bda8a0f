#pragma once

#include <chrono>
#include <iostream>
#include <utility>

#include "splr/likelihood.hpp"
#include "splr/thresholding.hpp"
#include "splr/types.hpp"

namespace splr {

enum class PolicyMode { theory, simple };

// Step-size policy built from data-driven scale estimates: nu is the spectral
// bound (max eigenvalue of the sample covariance, clamped >= 1), sigma_max /
// sigma_min the extreme retained eigenvalues of the initialization residual.
struct StepSizePolicy {
  double scale = 0.25;  // c1 in theory mode
  double nu = 1.0;
  double sigma_max = 1.0;
  double sigma_min = 1.0;
  PolicyMode mode = PolicyMode::theory;
};

// theory: (c1 / (sigma_max nu^2), c1 sigma_min / (sigma_max nu^4))
// simple: (0.1 / nu^2, 0.1 / nu^4)
inline std::pair<double, double> step_sizes(const StepSizePolicy& p) {
  if (p.nu <= 0 || p.sigma_max <= 0 || p.sigma_min <= 0 || p.scale <= 0)
    throw InputError("step_sizes: scales must be positive");
  if (p.sigma_min > p.sigma_max)
    throw InputError("step_sizes: sigma_min must not exceed sigma_max");
  const double nu2 = p.nu * p.nu;
  if (p.mode == PolicyMode::simple)
    return {0.1 / nu2, 0.1 / (nu2 * nu2)};
  return {p.scale / (p.sigma_max * nu2),
          p.scale * p.sigma_min / (p.sigma_max * nu2 * nu2)};
}

enum class Termination { max_iters, tolerance, stalled };

struct FitResult {
  Decomposition decomposition;
  FitTrace trace;
  Termination termination = Termination::max_iters;
};

namespace detail {

struct StepOutcome {
  Decomposition next;
  int halvings = 0;  // backtracking engagements in this step
};

inline StepOutcome altgd_step_impl(const CovarianceEstimate& cov,
                                   const Decomposition& dec,
                                   const FitConfig& cfg) {
  if (cfg.step_sparse <= 0 || cfg.step_factor <= 0)
    throw InputError("altgd_step: step sizes must be positive");
  if (cfg.sparsity < 0 || cfg.sparsity > dec.dim() * dec.dim())
    throw InputError("altgd_step: sparsity budget out of range");

  // Both gradients at the old iterate; the factor gradient is NOT re-evaluated
  // at the thresholded S. The sequential variant exists only for comparison.
  GradientPair grad = gradients(cov, dec);

  double eta = cfg.step_sparse;
  double eta_prime = cfg.step_factor;
  for (int halvings = 0; halvings <= 30; ++halvings) {
    Matrix s_half = dec.sparse() - eta * grad.wrt_sparse;
    Matrix s_next = hard_threshold_sym(s_half, cfg.sparsity, cfg.keep_diagonal);
    Matrix z_next;
    if (cfg.update_rule == UpdateRule::sequential) {
      Decomposition mid(s_next, dec.factor(), dec.sign());
      z_next = dec.factor() - eta_prime * gradient_factor(cov, mid);
    } else {
      z_next = dec.factor() - eta_prime * grad.wrt_factor;
    }
    Decomposition next(std::move(s_next), std::move(z_next), dec.sign());
    if (is_positive_definite(assemble_precision(next)))
      return {std::move(next), halvings};
    if (!cfg.backtrack) break;
    eta *= 0.5;
    eta_prime *= 0.5;
  }
  throw StepFailure(
      "altgd_step: iterate left the positive definite cone"
      " (shrink the base step sizes or re-initialize)");
}

}  // namespace detail

// One iteration: simultaneous gradient step in S and Z from the same point,
// hard thresholding on S. On a positive-definiteness failure with backtrack
// enabled, both step sizes are halved for this step only, up to 30 times.
inline Decomposition altgd_step(const CovarianceEstimate& cov,
                                const Decomposition& dec,
                                const FitConfig& cfg) {
  return detail::altgd_step_impl(cov, dec, cfg).next;
}

// Run up to max_iters steps from init, tracing objective and (when truth is
// given) errors per iteration. Stops early once the relative objective change
// stays below tol for 3 consecutive iterations; tol = 0 disables all early
// stopping and runs exactly max_iters steps.
inline FitResult fit(const CovarianceEstimate& cov, Decomposition init,
                     const FitConfig& cfg, const GroundTruth* truth = nullptr) {
  if (cfg.max_iters < 0) throw InputError("fit: max_iters must be >= 0");
  if (!cfg.keep_diagonal && cfg.sparsity < init.dim())
    std::cerr << "[splr] warning: sparsity budget " << cfg.sparsity
              << " < d = " << init.dim()
              << " without keep_diagonal; the sparse part may lose its"
                 " diagonal\n";

  const auto started = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - started)
        .count();
  };

  FitTrace trace;
  const auto record = [&](Index iter, const Decomposition& dec, double obj) {
    TraceRecord rec;
    rec.iteration = iter;
    rec.objective = obj;
    if (truth) {
      rec.err_sparse = (dec.sparse() - truth->sparse).norm();
      rec.err_low_rank = (dec.low_rank() - truth->low_rank).norm();
      rec.err_precision = (assemble_precision(dec) - truth->precision).norm();
    }
    rec.time_ms = elapsed_ms();
    trace.push_back(std::move(rec));
  };

  Decomposition current = std::move(init);
  double prev_obj = objective(cov, current);
  record(0, current, prev_obj);

  Termination reason = Termination::max_iters;
  int tol_streak = 0;
  int stall_streak = 0;
  for (Index t = 1; t <= cfg.max_iters; ++t) {
    int halvings = 0;
    try {
      detail::StepOutcome outcome = detail::altgd_step_impl(cov, current, cfg);
      current = std::move(outcome.next);
      halvings = outcome.halvings;
    } catch (StepFailure& failure) {
      failure.trace = std::move(trace);
      throw;
    }
    const double obj = objective(cov, current);
    record(t, current, obj);

    if (cfg.tol > 0) {
      const double rel =
          std::abs(obj - prev_obj) / std::max(std::abs(prev_obj), 1e-12);
      tol_streak = rel < cfg.tol ? tol_streak + 1 : 0;
      // "stalled": three straight iterations that both needed backtracking
      // and failed to improve the objective, i.e. bouncing on the cone
      // boundary rather than converging.
      stall_streak =
          (halvings > 0 && obj >= prev_obj) ? stall_streak + 1 : 0;
      if (tol_streak >= 3) {
        reason = Termination::tolerance;
        break;
      }
      if (stall_streak >= 3) {
        reason = Termination::stalled;
        break;
      }
    }
    prev_obj = obj;
  }
  return {std::move(current), std::move(trace), reason};
}

}  // namespace splr
