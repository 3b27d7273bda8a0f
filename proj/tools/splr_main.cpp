// splr command-line front end: generate / fit / eval / sweep / cv.
//
// Exit codes: 0 success, 2 input error, 3 singular covariance, 4 step
// failure, 5 baseline did not converge.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "splr/splr.hpp"

namespace {

using namespace splr;
using harness::Family;
using harness::Method;

constexpr int kExitInput = 2;
constexpr int kExitSingular = 3;
constexpr int kExitStepFailure = 4;
constexpr int kExitNotConverged = 5;

struct GlobalFlags {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  int exit_code = 0;
};

void add_generate(CLI::App& app, GlobalFlags& g) {
  auto* cmd = app.add_subcommand("generate", "write a synthetic instance");
  auto opt = std::make_shared<harness::GenerateOptions>();
  auto family = std::make_shared<std::string>("lvggm");
  cmd->add_option("--family", *family, "lvggm or generic")
      ->check(CLI::IsMember({"lvggm", "generic"}));
  cmd->add_option("-d,--dim", opt->dim, "observed dimension");
  cmd->add_option("-r,--rank", opt->rank, "latent rank");
  cmd->add_option("--nnz", opt->target_nnz,
                  "target nonzeros of the sparse part (0 = family default)");
  cmd->add_option("-n,--samples", opt->n, "sample count");
  cmd->callback([opt, family, &g] {
    opt->family = harness::parse_family(*family);
    opt->seed = g.seed;
    opt->out_dir = g.out.empty() ? "instance" : g.out;
    const auto s = harness::cmd_generate(*opt);
    std::cout << "generated family=" << *family << " d=" << s.d
              << " r=" << s.r << " n=" << s.n << " s_star=" << s.s_star
              << " sign=" << s.sign << " seed=" << s.seed
              << " out=" << opt->out_dir.string() << "\n";
  });
}

void add_fit(CLI::App& app, GlobalFlags& g) {
  auto* cmd = app.add_subcommand("fit", "estimate a decomposition from data");
  auto opt = std::make_shared<harness::FitOptions>();
  auto method = std::make_shared<std::string>("altgd");
  auto mode = std::make_shared<std::string>("theory");
  auto truth = std::make_shared<std::string>();
  auto gauss_seidel = std::make_shared<bool>(false);
  cmd->add_option("data", opt->data_path, "dataset CSV (n x d, no header)")
      ->required();
  cmd->add_option("--truth", *truth, "truth directory (enables error traces)");
  cmd->add_option("--method", *method, "altgd or admm")
      ->check(CLI::IsMember({"altgd", "admm"}));
  cmd->add_flag("--center", opt->center, "subtract column means");
  cmd->add_option("-s,--budget", opt->budget, "sparsity budget (full matrix)");
  cmd->add_option("--budget-scale", opt->budget_scale,
                  "budget = scale * s_star when --budget is 0 and truth given");
  cmd->add_option("-r,--rank", opt->rank, "factor rank");
  cmd->add_option("--sign", opt->sign, "+1 or -1 (0 = from truth, else +1)")
      ->check(CLI::IsMember({-1, 0, 1}));
  cmd->add_option("--mode", *mode, "step-size policy: theory or simple")
      ->check(CLI::IsMember({"theory", "simple"}));
  cmd->add_option("--c1", opt->c1, "theory-mode scale constant");
  cmd->add_option("--eta", opt->step_sparse, "explicit step size for S");
  cmd->add_option("--eta-prime", opt->step_factor, "explicit step size for Z");
  cmd->add_option("-T,--max-iters", opt->max_iters, "iteration cap");
  cmd->add_option("--tol", opt->tol, "early-stop tolerance (0 disables)");
  cmd->add_flag("--keep-diagonal", opt->keep_diagonal,
                "exempt the diagonal from thresholding");
  cmd->add_flag("!--no-backtrack", opt->backtrack,
                "disable step halving on definiteness failures");
  cmd->add_option("--ridge", opt->ridge, "ridge for the initializer");
  cmd->add_flag("--gauss-seidel", *gauss_seidel,
                "comparison-only sequential update order");
  cmd->add_option("--lambda", opt->l1_weight, "admm l1 weight (0 = auto)");
  cmd->add_option("--gamma", opt->trace_weight, "admm trace weight (0 = auto)");
  cmd->add_option("--beta", opt->beta, "admm penalty");
  cmd->add_option("--admm-iters", opt->admm_iters, "admm iteration cap");
  cmd->add_option("--primal-tol", opt->primal_tol, "admm primal tolerance");
  cmd->add_option("--dual-tol", opt->dual_tol, "admm dual tolerance");
  cmd->callback([opt, method, mode, truth, gauss_seidel, &g] {
    opt->method = harness::parse_method(*method);
    opt->mode = *mode == "simple" ? PolicyMode::simple : PolicyMode::theory;
    if (!truth->empty()) opt->truth_dir = *truth;
    if (*gauss_seidel) opt->update_rule = UpdateRule::sequential;
    opt->out_dir = g.out.empty() ? "fit" : g.out;
    const auto s = harness::cmd_fit(*opt);
    std::cout << "fit method=" << harness::to_string(s.method)
              << " iterations=" << s.iterations << " termination="
              << s.termination << " time_ms=" << s.time_ms
              << " out=" << opt->out_dir.string() << "\n";
    if (s.method == Method::admm && !s.converged) g.exit_code = kExitNotConverged;
  });
}

void add_eval(CLI::App& app, GlobalFlags& g) {
  auto* cmd = app.add_subcommand("eval", "score a fit against a truth");
  auto opt = std::make_shared<harness::EvalOptions>();
  cmd->add_option("fit_dir", opt->fit_dir)->required();
  cmd->add_option("truth_dir", opt->truth_dir)->required();
  cmd->callback([opt, &g] {
    const auto metrics = harness::cmd_eval(*opt);
    if (g.out.empty()) {
      std::cout << metrics.dump(2) << "\n";
    } else {
      auto out = io::detail::open_out(g.out);
      out << metrics.dump(2) << '\n';
    }
  });
}

void add_sweep(CLI::App& app, GlobalFlags& g) {
  auto* cmd = app.add_subcommand("sweep", "generate/fit/eval over a grid");
  auto opt = std::make_shared<harness::SweepOptions>();
  auto family = std::make_shared<std::string>("lvggm");
  auto method = std::make_shared<std::string>("altgd");
  auto mode = std::make_shared<std::string>("theory");
  cmd->add_option("--family", *family)->check(CLI::IsMember({"lvggm", "generic"}));
  cmd->add_option("--method", *method)->check(CLI::IsMember({"altgd", "admm"}));
  cmd->add_option("-d,--dims", opt->dims, "grid of dimensions");
  cmd->add_option("-r,--ranks", opt->ranks, "grid of ranks");
  cmd->add_option("-n,--samples", opt->ns, "grid of sample counts");
  cmd->add_option("--nnz", opt->nnzs, "grid of sparse-part nonzero targets");
  cmd->add_option("--seeds", opt->seeds, "seeds per cell");
  cmd->add_option("--budget-scale", opt->budget_scale);
  cmd->add_option("--mode", *mode)->check(CLI::IsMember({"theory", "simple"}));
  cmd->add_option("--c1", opt->c1);
  cmd->add_option("-T,--max-iters", opt->max_iters);
  cmd->add_option("--tol", opt->tol);
  cmd->add_flag("--keep-diagonal", opt->keep_diagonal);
  cmd->add_option("--ridge", opt->ridge);
  cmd->add_flag("!--no-timing", opt->emit_timing,
                "write zeros in time_ms (byte-stable reruns)");
  cmd->callback([opt, family, method, mode, &g] {
    opt->family = harness::parse_family(*family);
    opt->method = harness::parse_method(*method);
    opt->mode = *mode == "simple" ? PolicyMode::simple : PolicyMode::theory;
    opt->base_seed = g.seed;
    opt->threads = g.threads;
    opt->out_csv = g.out.empty() ? "sweep.csv" : g.out;
    const auto rows = harness::cmd_sweep(*opt);
    std::size_t failed = 0;
    for (const auto& row : rows) failed += !row.error.empty();
    std::cout << "sweep cells=" << rows.size() << " failed=" << failed
              << " out=" << opt->out_csv->string() << "\n";
  });
}

void add_cv(CLI::App& app, GlobalFlags& g) {
  auto* cmd = app.add_subcommand("cv", "cross-validate budget and rank");
  auto opt = std::make_shared<harness::CvOptions>();
  auto mode = std::make_shared<std::string>("theory");
  cmd->add_option("data", opt->data_path)->required();
  cmd->add_option("-s,--budgets", opt->budget_grid, "sparsity budgets")
      ->required();
  cmd->add_option("-r,--ranks", opt->rank_grid, "ranks")->required();
  cmd->add_option("-K,--folds", opt->folds)->check(CLI::Range(2, 1000));
  cmd->add_option("--sign", opt->sign)->check(CLI::IsMember({-1, 1}));
  cmd->add_flag("--center", opt->center);
  cmd->add_option("--mode", *mode)->check(CLI::IsMember({"theory", "simple"}));
  cmd->add_option("--c1", opt->c1);
  cmd->add_option("-T,--max-iters", opt->max_iters);
  cmd->add_option("--tol", opt->tol);
  cmd->add_flag("--keep-diagonal", opt->keep_diagonal);
  cmd->add_option("--ridge", opt->ridge);
  cmd->callback([opt, mode, &g] {
    opt->mode = *mode == "simple" ? PolicyMode::simple : PolicyMode::theory;
    opt->seed = g.seed;
    if (!g.out.empty()) opt->out_csv = g.out;
    const auto result = harness::cmd_cv(*opt);
    std::cout << "cv best_budget=" << result.best_budget
              << " best_rank=" << result.best_rank << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse + low-rank precision matrix estimation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "declarative config file (sections per command)");

  GlobalFlags g;
  app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = cores)");
  app.add_option("--out", g.out, "output path or directory");

  add_generate(app, g);
  add_fit(app, g);
  add_eval(app, g);
  add_sweep(app, g);
  add_cv(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInput;
  } catch (const splr::CovarianceSingular& e) {
    std::cerr << "CovarianceSingular: " << e.what() << "\n";
    return kExitSingular;
  } catch (const splr::StepFailure& e) {
    std::cerr << "StepFailure: " << e.what() << "\n";
    return kExitStepFailure;
  } catch (const splr::InputError& e) {
    std::cerr << "InputError: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return g.exit_code;
}
