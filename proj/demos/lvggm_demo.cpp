// End-to-end library usage on one synthetic instance: generate, initialize,
// fit, and print the recovery errors against the planted truth.

#include <cstdio>

#include "splr/splr.hpp"

int main() {
  using namespace splr;

  LvggmSpec spec;
  spec.dim = 60;
  spec.latent = 2;
  spec.seed = 7;
  const GroundTruth truth = generate_lvggm(spec);
  const Dataset data = sample_gaussian(truth, 4000, spec.seed);
  const CovarianceEstimate cov = sample_covariance(data);

  const Index budget = Index(1.2 * double(truth.nnz_sparse));
  InitResult init = spectral_init(cov, budget, truth.rank, truth.sign);
  StepSizePolicy policy =
      estimate_scales(init.cov_lambda_max, init.residual_eigenvalues);

  FitConfig cfg;
  cfg.sparsity = budget;
  cfg.rank = truth.rank;
  cfg.sign = truth.sign;
  cfg.max_iters = 150;
  std::tie(cfg.step_sparse, cfg.step_factor) = step_sizes(policy);

  const FitResult result = fit(cov, init.decomposition, cfg, &truth);
  const TraceRecord& first = result.trace.front();
  const TraceRecord& last = result.trace.back();
  std::printf("iterations: %td\n", last.iteration);
  std::printf("precision error: %.4f -> %.4f\n", *first.err_precision,
              *last.err_precision);
  std::printf("sparse error:    %.4f -> %.4f\n", *first.err_sparse,
              *last.err_sparse);
  std::printf("factor distance: %.4f\n",
              procrustes_distance(result.decomposition.factor(),
                                  *truth.factor));
  return 0;
}
