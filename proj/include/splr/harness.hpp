#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "splr/admm.hpp"
#include "splr/init.hpp"
#include "splr/io.hpp"
#include "splr/metrics.hpp"
#include "splr/optimizer.hpp"
#include "splr/synth.hpp"

// Command cores shared by the CLI and the test suites. Each cmd_* function is
// deterministic given its options (modulo the wall-clock timing fields, which
// can be suppressed where byte-stable output matters).

namespace splr::harness {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Family { lvggm, generic };
enum class Method { altgd, admm };

inline std::string to_string(Family f) {
  return f == Family::lvggm ? "lvggm" : "generic";
}
inline std::string to_string(Method m) {
  return m == Method::altgd ? "altgd" : "admm";
}
inline Family parse_family(const std::string& s) {
  if (s == "lvggm") return Family::lvggm;
  if (s == "generic") return Family::generic;
  throw InputError("unknown family: " + s);
}
inline Method parse_method(const std::string& s) {
  if (s == "altgd") return Method::altgd;
  if (s == "admm") return Method::admm;
  throw InputError("unknown method: " + s);
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  Family family = Family::lvggm;
  Index dim = 100;
  Index rank = 2;
  Index target_nnz = 0;  // 0 = family default fraction of d^2
  Index n = 2000;
  std::uint64_t seed = 0;
  fs::path out_dir;
};

inline GroundTruth make_truth(Family family, Index dim, Index rank,
                              Index target_nnz, std::uint64_t seed) {
  if (family == Family::lvggm) {
    LvggmSpec spec;
    spec.dim = dim;
    spec.latent = rank;
    spec.target_nnz = target_nnz;
    spec.seed = seed;
    return generate_lvggm(spec);
  }
  GenericSpec spec;
  spec.dim = dim;
  spec.rank = rank;
  spec.target_nnz = target_nnz;
  spec.seed = seed;
  return generate_generic(spec);
}

inline void write_truth(const fs::path& dir, const GroundTruth& gt,
                        const json& extra_meta = json::object()) {
  fs::create_directories(dir);
  io::write_matrix(dir / "S_star.txt", gt.sparse);
  io::write_matrix(dir / "L_star.txt", gt.low_rank);
  io::write_matrix(dir / "Omega_star.txt", gt.precision);
  if (gt.factor) io::write_matrix(dir / "Z_star.txt", *gt.factor);
  json meta = extra_meta;
  meta["d"] = gt.sparse.rows();
  meta["r"] = gt.rank;
  meta["s_star"] = gt.nnz_sparse;
  meta["sign"] = gt.sign;
  auto out = io::detail::open_out(dir / "meta.json");
  out << meta.dump(2) << '\n';
}

inline GroundTruth read_truth(const fs::path& dir) {
  GroundTruth gt;
  gt.sparse = io::read_matrix(dir / "S_star.txt");
  gt.low_rank = io::read_matrix(dir / "L_star.txt");
  gt.precision = io::read_matrix(dir / "Omega_star.txt");
  if (fs::exists(dir / "Z_star.txt"))
    gt.factor = io::read_matrix(dir / "Z_star.txt");
  auto in = io::detail::open_in(dir / "meta.json");
  json meta = json::parse(in);
  gt.rank = meta.at("r").get<Index>();
  gt.nnz_sparse = meta.at("s_star").get<Index>();
  gt.sign = meta.at("sign").get<int>();
  validate_ground_truth(gt);
  return gt;
}

struct GenerateSummary {
  Index d = 0, r = 0, n = 0, s_star = 0;
  std::uint64_t seed = 0;
  int sign = 1;
};

// Writes S_star/L_star/Omega_star/Z_star matrices, the sampled dataset and a
// meta.json into out_dir; returns the manifest fields.
inline GenerateSummary cmd_generate(const GenerateOptions& opt) {
  const GroundTruth gt =
      make_truth(opt.family, opt.dim, opt.rank, opt.target_nnz, opt.seed);
  const Dataset data = sample_gaussian(gt, opt.n, opt.seed);
  json extra;
  extra["family"] = to_string(opt.family);
  extra["n"] = opt.n;
  extra["seed"] = opt.seed;
  write_truth(opt.out_dir, gt, extra);
  io::write_dataset(opt.out_dir / "data.csv", data);
  return {opt.dim, gt.rank, opt.n, gt.nnz_sparse, opt.seed, gt.sign};
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  fs::path data_path;
  fs::path out_dir;
  std::optional<fs::path> truth_dir;
  Method method = Method::altgd;
  bool center = false;  // subtract column means before the covariance

  // altgd
  Index budget = 0;           // s; 0 derives round(budget_scale * s_star)
  double budget_scale = 1.2;  // used only when budget is derived from truth
  Index rank = 0;             // 0 takes the truth's rank
  int sign = 0;               // 0 takes the truth's sign, else +1
  PolicyMode mode = PolicyMode::theory;
  double c1 = 0.25;
  double step_sparse = 0;  // explicit step overrides (0 = from policy)
  double step_factor = 0;
  Index max_iters = 200;
  double tol = 1e-7;
  bool keep_diagonal = false;
  bool backtrack = true;
  double ridge = 0.0;
  UpdateRule update_rule = UpdateRule::simultaneous;

  // admm
  double l1_weight = 0;     // 0 = sqrt(log d / n)
  double trace_weight = 0;  // 0 = sqrt(d / n)
  double beta = 1.0;
  Index admm_iters = 500;
  double primal_tol = 1e-5;
  double dual_tol = 1e-5;
};

struct FitSummary {
  Method method = Method::altgd;
  double time_ms = 0;  // wall clock around initialization + iteration only
  Index iterations = 0;
  bool converged = true;  // admm: reached tolerance; altgd: no step failure
  std::string termination;
};

inline Dataset centered(const Dataset& data) {
  Matrix x = data.samples();
  x.rowwise() -= x.colwise().mean();
  return Dataset(std::move(x));
}

namespace detail {

inline double wall_ms_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

struct AltgdRun {
  FitResult result;
  double time_ms = 0;
};

// initialization + fit, timed together (file I/O excluded).
inline AltgdRun run_altgd(const CovarianceEstimate& cov, Index budget,
                          Index rank, int sign, const FitOptions& opt,
                          const GroundTruth* truth) {
  const auto start = std::chrono::steady_clock::now();
  InitResult init = spectral_init(cov, budget, rank, sign, opt.ridge);
  FitConfig cfg;
  cfg.sparsity = budget;
  cfg.rank = rank;
  cfg.sign = sign;
  cfg.max_iters = opt.max_iters;
  cfg.tol = opt.tol;
  cfg.keep_diagonal = opt.keep_diagonal;
  cfg.backtrack = opt.backtrack;
  cfg.update_rule = opt.update_rule;
  if (opt.step_sparse > 0 && opt.step_factor > 0) {
    cfg.step_sparse = opt.step_sparse;
    cfg.step_factor = opt.step_factor;
  } else {
    StepSizePolicy policy =
        estimate_scales(init.cov_lambda_max, init.residual_eigenvalues);
    policy.mode = opt.mode;
    policy.scale = opt.c1;
    std::tie(cfg.step_sparse, cfg.step_factor) = step_sizes(policy);
  }
  FitResult result = fit(cov, init.decomposition, cfg, truth);
  return {std::move(result), wall_ms_since(start)};
}

inline std::string termination_name(Termination t) {
  switch (t) {
    case Termination::max_iters: return "max_iters";
    case Termination::tolerance: return "tolerance";
    case Termination::stalled: return "stalled";
  }
  return "unknown";
}

}  // namespace detail

// Loads the dataset, runs the chosen method, and writes trace.csv, the final
// matrices (S/Z for altgd, S/L for admm) and meta.json into out_dir. A
// StepFailure still writes the partial trace before propagating.
inline FitSummary cmd_fit(const FitOptions& opt) {
  Dataset data = io::read_dataset(opt.data_path);
  if (opt.center) data = centered(data);
  std::optional<GroundTruth> truth;
  if (opt.truth_dir) truth = read_truth(*opt.truth_dir);
  const CovarianceEstimate cov = sample_covariance(data);
  fs::create_directories(opt.out_dir);

  FitSummary summary;
  summary.method = opt.method;
  json meta;
  meta["method"] = to_string(opt.method);

  if (opt.method == Method::altgd) {
    Index budget = opt.budget;
    if (budget == 0) {
      if (!truth)
        throw InputError("fit: --budget is required without a truth directory");
      budget = Index(std::llround(opt.budget_scale * double(truth->nnz_sparse)));
    }
    Index rank = opt.rank;
    if (rank == 0) {
      if (!truth)
        throw InputError("fit: --rank is required without a truth directory");
      rank = truth->rank;
    }
    const int sign = opt.sign != 0 ? opt.sign : (truth ? truth->sign : 1);

    std::optional<detail::AltgdRun> run;
    try {
      run.emplace(detail::run_altgd(cov, budget, rank, sign, opt,
                                    truth ? &*truth : nullptr));
    } catch (const StepFailure& failure) {
      io::write_trace_csv(opt.out_dir / "trace.csv", failure.trace);
      throw;
    }
    io::write_trace_csv(opt.out_dir / "trace.csv", run->result.trace);
    io::write_matrix(opt.out_dir / "S.txt", run->result.decomposition.sparse());
    io::write_matrix(opt.out_dir / "Z.txt", run->result.decomposition.factor());
    summary.time_ms = run->time_ms;
    summary.iterations = Index(run->result.trace.size()) - 1;
    summary.termination = detail::termination_name(run->result.termination);
    meta["sign"] = sign;
    meta["budget"] = budget;
    meta["rank"] = rank;
    meta["termination"] = summary.termination;
  } else {
    AdmmConfig cfg;
    const double d = double(cov.dim()), n = double(data.n());
    cfg.l1_weight =
        opt.l1_weight > 0 ? opt.l1_weight : std::sqrt(std::log(d) / n);
    cfg.trace_weight =
        opt.trace_weight > 0 ? opt.trace_weight : std::sqrt(d / n);
    cfg.penalty = opt.beta;
    cfg.max_iters = opt.admm_iters;
    cfg.primal_tol = opt.primal_tol;
    cfg.dual_tol = opt.dual_tol;
    const auto start = std::chrono::steady_clock::now();
    AdmmResult result = admm_fit(cov, cfg, truth ? &*truth : nullptr);
    summary.time_ms = detail::wall_ms_since(start);
    io::write_admm_trace_csv(opt.out_dir / "trace.csv", result.trace);
    io::write_matrix(opt.out_dir / "S.txt", result.sparse);
    io::write_matrix(opt.out_dir / "L.txt", result.low_rank);
    summary.iterations = Index(result.trace.size());
    summary.converged = result.converged;
    summary.termination = result.converged ? "converged" : "max_iters";
    meta["lambda"] = cfg.l1_weight;
    meta["gamma"] = cfg.trace_weight;
    meta["converged"] = result.converged;
  }

  meta["iterations"] = summary.iterations;
  meta["time_ms"] = summary.time_ms;
  auto out = io::detail::open_out(opt.out_dir / "meta.json");
  out << meta.dump(2) << '\n';
  return summary;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  fs::path fit_dir;
  fs::path truth_dir;
};

// Fixed key names: err_s, err_l, err_omega, dist_z, f1, spikiness, time_ms.
// dist_z appears only when both the fit factor and the truth factor exist;
// spikiness only when the estimated low-rank part is nonzero.
inline json cmd_eval(const EvalOptions& opt) {
  const GroundTruth truth = read_truth(opt.truth_dir);
  auto in = io::detail::open_in(opt.fit_dir / "meta.json");
  const json fit_meta = json::parse(in);
  const Method method = parse_method(fit_meta.at("method").get<std::string>());

  Matrix sparse_hat = io::read_matrix(opt.fit_dir / "S.txt");
  Matrix low_rank_hat;
  std::optional<Matrix> factor_hat;
  if (method == Method::altgd) {
    const int sign = fit_meta.at("sign").get<int>();
    factor_hat = io::read_matrix(opt.fit_dir / "Z.txt");
    low_rank_hat =
        symmetrized(double(sign) * (*factor_hat * factor_hat->transpose()));
  } else {
    low_rank_hat = io::read_matrix(opt.fit_dir / "L.txt");
  }
  const Matrix omega_hat = sparse_hat + low_rank_hat;

  json out;
  out["err_s"] = frobenius_error(sparse_hat, truth.sparse);
  // The PSD-cone baseline estimates sign * L*; the factored method carries
  // its own sign and compares directly.
  const Matrix low_rank_ref = method == Method::admm
                                  ? Matrix(double(truth.sign) * truth.low_rank)
                                  : truth.low_rank;
  out["err_l"] = frobenius_error(low_rank_hat, low_rank_ref);
  out["err_omega"] = frobenius_error(omega_hat, truth.precision);
  if (factor_hat && truth.factor)
    out["dist_z"] = procrustes_distance(*factor_hat, *truth.factor);
  const SupportMetrics sm = support_metrics(sparse_hat, truth.sparse,
                                            default_support_tol(truth.sparse));
  out["precision"] = sm.precision;
  out["recall"] = sm.recall;
  out["f1"] = sm.f1;
  if (low_rank_hat.norm() > 0) out["spikiness"] = spikiness(low_rank_hat);
  out["time_ms"] = fit_meta.value("time_ms", 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  Family family = Family::lvggm;
  Method method = Method::altgd;
  std::vector<Index> dims{100};
  std::vector<Index> ranks{2};
  std::vector<Index> ns{2000};
  std::vector<Index> nnzs{0};  // 0 = family default
  Index seeds = 3;             // seed indices 0 .. seeds-1
  std::uint64_t base_seed = 0;

  double budget_scale = 1.2;
  PolicyMode mode = PolicyMode::theory;
  double c1 = 0.25;
  Index max_iters = 200;
  double tol = 1e-7;
  bool keep_diagonal = false;
  bool backtrack = true;
  double ridge = 0.0;

  int threads = 0;          // 0 = hardware concurrency
  bool emit_timing = true;  // false writes 0 in time_ms for byte-stable CSV
  std::optional<fs::path> out_csv;
};

struct SweepRow {
  Index d = 0, r = 0, n = 0, s_star = 0, seed = 0, budget = 0, iters = 0;
  double err_s = 0, err_l = 0, err_omega = 0, dist_z = 0, f1 = 0,
         spikiness_l = 0, rate_s = 0, rate_l = 0, time_ms = 0;
  std::string error;  // nonempty = cell failed; other fields undefined
};

namespace detail {

// Cell RNG streams: the truth key excludes n, so a given seed index keeps the
// same planted truth as the sample size grows.
inline std::uint64_t truth_seed(const SweepOptions& o, Index d, Index r,
                                Index nnz, Index seed_idx) {
  return mix_key(o.base_seed, 0x7472757468ULL, std::uint64_t(d),
                 std::uint64_t(r), std::uint64_t(nnz), std::uint64_t(seed_idx));
}

inline std::uint64_t data_seed(const SweepOptions& o, Index d, Index r,
                               Index nnz, Index n, Index seed_idx) {
  return mix_key(o.base_seed, 0x64617461ULL, std::uint64_t(d), std::uint64_t(r),
                 std::uint64_t(nnz), std::uint64_t(n), std::uint64_t(seed_idx));
}

inline SweepRow run_sweep_cell(const SweepOptions& o, Index d, Index r,
                               Index nnz, Index n, Index seed_idx) {
  SweepRow row;
  row.d = d;
  row.r = r;
  row.n = n;
  row.seed = seed_idx;
  try {
    const GroundTruth truth =
        make_truth(o.family, d, r, nnz, truth_seed(o, d, r, nnz, seed_idx));
    const Dataset data =
        sample_gaussian(truth, n, data_seed(o, d, r, nnz, n, seed_idx));
    const CovarianceEstimate cov = sample_covariance(data);
    row.s_star = truth.nnz_sparse;
    row.rate_s = std::sqrt(double(truth.nnz_sparse) * std::log(double(d)) /
                           double(n));
    row.rate_l = std::sqrt(double(r) * double(d) / double(n));

    const auto start = std::chrono::steady_clock::now();
    if (o.method == Method::altgd) {
      row.budget = Index(std::llround(o.budget_scale * double(truth.nnz_sparse)));
      InitResult init =
          spectral_init(cov, row.budget, r, truth.sign, o.ridge);
      StepSizePolicy policy =
          estimate_scales(init.cov_lambda_max, init.residual_eigenvalues);
      policy.mode = o.mode;
      policy.scale = o.c1;
      FitConfig cfg;
      cfg.sparsity = row.budget;
      cfg.rank = r;
      cfg.sign = truth.sign;
      cfg.max_iters = o.max_iters;
      cfg.tol = o.tol;
      cfg.keep_diagonal = o.keep_diagonal;
      cfg.backtrack = o.backtrack;
      std::tie(cfg.step_sparse, cfg.step_factor) = step_sizes(policy);
      const FitResult fitres = fit(cov, init.decomposition, cfg, &truth);
      row.time_ms = wall_ms_since(start);
      row.iters = Index(fitres.trace.size()) - 1;
      const Decomposition& dec = fitres.decomposition;
      row.err_s = (dec.sparse() - truth.sparse).norm();
      const Matrix low_rank = dec.low_rank();
      row.err_l = (low_rank - truth.low_rank).norm();
      row.err_omega = (assemble_precision(dec) - truth.precision).norm();
      row.dist_z = truth.factor
                       ? procrustes_distance(dec.factor(), *truth.factor)
                       : std::nan("");
      row.f1 = support_metrics(dec.sparse(), truth.sparse,
                               default_support_tol(truth.sparse))
                   .f1;
      row.spikiness_l = low_rank.norm() > 0 ? spikiness(low_rank) : std::nan("");
    } else {
      AdmmConfig cfg;
      cfg.l1_weight = std::sqrt(std::log(double(d)) / double(n));
      cfg.trace_weight = std::sqrt(double(d) / double(n));
      const AdmmResult res = admm_fit(cov, cfg, &truth);
      row.time_ms = wall_ms_since(start);
      row.iters = Index(res.trace.size());
      row.err_s = (res.sparse - truth.sparse).norm();
      row.err_l =
          (res.low_rank - double(truth.sign) * truth.low_rank).norm();
      row.err_omega = (res.precision - truth.precision).norm();
      row.dist_z = std::nan("");
      row.f1 = support_metrics(res.sparse, truth.sparse,
                               default_support_tol(truth.sparse))
                   .f1;
      row.spikiness_l =
          res.low_rank.norm() > 0 ? spikiness(res.low_rank) : std::nan("");
    }
  } catch (const std::exception& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), ',', ';');
    std::replace(what.begin(), what.end(), '\n', ' ');
    row.error = what;
  }
  return row;
}

}  // namespace detail

inline std::string sweep_csv_header() {
  return "family,method,d,r,n,s_star,seed,budget,iters,err_s,err_l,err_omega,"
         "dist_z,f1,spikiness,rate_s,rate_l,time_ms,error";
}

inline std::string sweep_csv_row(const SweepOptions& o, const SweepRow& r) {
  std::string line = to_string(o.family) + ',' + to_string(o.method) + ',';
  const auto num = [](double v) { return io::format_double(v); };
  line += std::to_string(r.d) + ',' + std::to_string(r.r) + ',' +
          std::to_string(r.n) + ',' + std::to_string(r.s_star) + ',' +
          std::to_string(r.seed) + ',' + std::to_string(r.budget) + ',' +
          std::to_string(r.iters) + ',';
  if (r.error.empty()) {
    line += num(r.err_s) + ',' + num(r.err_l) + ',' + num(r.err_omega) + ',' +
            num(r.dist_z) + ',' + num(r.f1) + ',' + num(r.spikiness_l) + ',' +
            num(r.rate_s) + ',' + num(r.rate_l) + ',' +
            num(o.emit_timing ? r.time_ms : 0.0) + ',';
  } else {
    line += ",,,,,,,,,";
  }
  line += r.error;
  return line;
}

// Runs every (d, r, nnz, n, seed) cell, in parallel across a worker pool, and
// assembles rows in deterministic grid order regardless of scheduling.
inline std::vector<SweepRow> cmd_sweep(const SweepOptions& opt) {
  if (opt.dims.empty() || opt.ranks.empty() || opt.ns.empty() ||
      opt.nnzs.empty() || opt.seeds < 1)
    throw InputError("sweep: empty grid");

  struct Cell {
    Index d, r, nnz, n, seed;
  };
  std::vector<Cell> cells;
  auto sorted = [](std::vector<Index> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  for (Index d : sorted(opt.dims))
    for (Index r : sorted(opt.ranks))
      for (Index nnz : sorted(opt.nnzs))
        for (Index n : sorted(opt.ns))
          for (Index s = 0; s < opt.seeds; ++s)
            cells.push_back({d, r, nnz, n, s});

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const unsigned pool = opt.threads > 0
                            ? unsigned(opt.threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const Cell& c = cells[idx];
      rows[idx] = detail::run_sweep_cell(opt, c.d, c.r, c.nnz, c.n, c.seed);
    }
  };
  std::vector<std::thread> threads;
  for (unsigned i = 1; i < pool; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  if (opt.out_csv) {
    auto out = io::detail::open_out(*opt.out_csv);
    out << sweep_csv_header() << '\n';
    for (const auto& row : rows) out << sweep_csv_row(opt, row) << '\n';
  }
  return rows;
}

// ---------------------------------------------------------------------------
// cross-validation

struct CvOptions {
  fs::path data_path;
  std::vector<Index> budget_grid;
  std::vector<Index> rank_grid;
  Index folds = 4;
  std::uint64_t seed = 0;
  int sign = 1;
  bool center = false;

  PolicyMode mode = PolicyMode::theory;
  double c1 = 0.25;
  Index max_iters = 200;
  double tol = 1e-7;
  bool keep_diagonal = false;
  bool backtrack = true;
  double ridge = 0.0;

  std::optional<fs::path> out_csv;  // score table
};

struct CvCell {
  Index budget = 0, rank = 0;
  double score = 0;  // +inf when any fold failed
};

struct CvResult {
  Index best_budget = 0, best_rank = 0;
  std::vector<CvCell> table;
};

namespace detail {

inline double holdout_score(const CovarianceEstimate& val_cov,
                            const Matrix& omega) {
  Eigen::LLT<Matrix> llt(omega);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return val_cov.matrix().cwiseProduct(omega).sum() - log_det;
}

}  // namespace detail

// K-fold cross-validation over (budget, rank): folds are contiguous blocks of
// the seed-shuffled sample index; each cell is scored by the held-out
// negative log-likelihood averaged over folds. Ties break toward the smaller
// budget, then the smaller rank.
inline CvResult cmd_cv(const CvOptions& opt) {
  if (opt.budget_grid.empty() || opt.rank_grid.empty())
    throw InputError("cv: empty grid");
  if (opt.folds < 2) throw InputError("cv: need at least 2 folds");

  Dataset data = io::read_dataset(opt.data_path);
  if (opt.center) data = centered(data);
  const Index n = data.n();
  if (n < 2 * opt.folds) throw InputError("cv: need n >= 2K samples");

  // seed-shuffled index, then contiguous blocks as folds
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[std::size_t(i)] = i;
  RngStream shuffle(opt.seed, 0x6376ULL);
  for (Index i = n - 1; i > 0; --i)
    std::swap(order[std::size_t(i)],
              order[std::size_t(Index(shuffle.below(std::uint64_t(i) + 1)))]);

  std::vector<std::pair<Index, Index>> fold_bounds;  // [begin, end) into order
  for (Index k = 0; k < opt.folds; ++k)
    fold_bounds.emplace_back(k * n / opt.folds, (k + 1) * n / opt.folds);

  const auto gather = [&](Index skip_fold, bool validation) {
    std::vector<Index> keep;
    for (Index k = 0; k < opt.folds; ++k) {
      if ((k == skip_fold) != validation) continue;
      for (Index i = fold_bounds[std::size_t(k)].first;
           i < fold_bounds[std::size_t(k)].second; ++i)
        keep.push_back(order[std::size_t(i)]);
    }
    Matrix x(Index(keep.size()), data.d());
    for (std::size_t i = 0; i < keep.size(); ++i)
      x.row(Index(i)) = data.samples().row(keep[i]);
    return Dataset(std::move(x));
  };

  std::vector<CovarianceEstimate> train_cov, val_cov;
  for (Index k = 0; k < opt.folds; ++k) {
    train_cov.push_back(sample_covariance(gather(k, false)));
    val_cov.push_back(sample_covariance(gather(k, true)));
  }

  auto sorted = [](std::vector<Index> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  CvResult result;
  double best = std::numeric_limits<double>::infinity();
  for (Index budget : sorted(opt.budget_grid)) {
    for (Index rank : sorted(opt.rank_grid)) {
      double score = 0;
      for (Index k = 0; k < opt.folds; ++k) {
        try {
          InitResult init =
              spectral_init(train_cov[std::size_t(k)], budget, rank, opt.sign,
                            opt.ridge);
          StepSizePolicy policy = estimate_scales(
              init.cov_lambda_max, init.residual_eigenvalues);
          policy.mode = opt.mode;
          policy.scale = opt.c1;
          FitConfig cfg;
          cfg.sparsity = budget;
          cfg.rank = rank;
          cfg.sign = opt.sign;
          cfg.max_iters = opt.max_iters;
          cfg.tol = opt.tol;
          cfg.keep_diagonal = opt.keep_diagonal;
          cfg.backtrack = opt.backtrack;
          std::tie(cfg.step_sparse, cfg.step_factor) = step_sizes(policy);
          const FitResult fr =
              fit(train_cov[std::size_t(k)], init.decomposition, cfg);
          score += detail::holdout_score(
              val_cov[std::size_t(k)],
              assemble_precision(fr.decomposition));
        } catch (const std::exception&) {
          score = std::numeric_limits<double>::infinity();
          break;
        }
      }
      if (std::isfinite(score)) score /= double(opt.folds);
      result.table.push_back({budget, rank, score});
      if (score < best) {  // strict: first minimum wins the tie
        best = score;
        result.best_budget = budget;
        result.best_rank = rank;
      }
    }
  }

  if (opt.out_csv) {
    auto out = io::detail::open_out(*opt.out_csv);
    out << "budget,rank,score\n";
    for (const auto& cell : result.table)
      out << cell.budget << ',' << cell.rank << ','
          << io::format_double(cell.score) << '\n';
  }
  return result;
}

}  // namespace splr::harness
