#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smkl/data_io.hpp"
#include "smkl/model_select.hpp"
#include "smkl/relaxations.hpp"
#include "smkl/report.hpp"

namespace {

using namespace smkl;

struct CommonArgs {
  std::string data_path;
  std::string schema_path;
  std::string kernels_path;
  double C = 1.0;
  double lambda = 1.0;
  int k0 = 1;
  double eps = 1e-6;
  int patience = 3;
  int max_iter = 100;
  std::uint64_t seed = 0;
  std::string init = "random";
  std::vector<std::string> relax_levels;
  int rand_vectors = 64;
  std::string out_path;
  double mem_budget_mb = 1024.0;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_model_flags) {
  cmd->add_option("--data", a.data_path, "training CSV file")
      ->envname("SMKL_DATA")
      ->required();
  cmd->add_option("--schema", a.schema_path, "JSON column schema")
      ->envname("SMKL_SCHEMA")
      ->required();
  cmd->add_option("--kernels", a.kernels_path,
                  "kernel bank config (JSON); defaults to the 10-member bank")
      ->envname("SMKL_KERNELS");
  cmd->add_option("--seed", a.seed, "split/init seed")->envname("SMKL_SEED");
  cmd->add_option("--out", a.out_path, "report output file (default stdout)")
      ->envname("SMKL_OUT");
  cmd->add_option("--mem-budget-mb", a.mem_budget_mb,
                  "relaxation memory budget")
      ->envname("SMKL_MEM_BUDGET_MB");
  cmd->add_option("--threads", a.threads, "worker cap for parallel stages")
      ->envname("SMKL_THREADS");
  if (with_model_flags) {
    cmd->add_option("--C", a.C, "SVM box parameter")->envname("SMKL_C");
    cmd->add_option("--lambda", a.lambda, "l2 weight penalty")
        ->envname("SMKL_LAMBDA");
    cmd->add_option("--k0", a.k0, "weight cardinality bound")
        ->envname("SMKL_K0");
    cmd->add_option("--eps", a.eps, "improvement tolerance")
        ->envname("SMKL_EPS");
    cmd->add_option("--patience", a.patience,
                    "non-improving iterations before stopping (M)")
        ->envname("SMKL_PATIENCE");
    cmd->add_option("--max-iter", a.max_iter, "iteration cap (T)")
        ->envname("SMKL_MAX_ITER");
    cmd->add_option("--init", a.init, "random | warm")
        ->envname("SMKL_INIT")
        ->check(CLI::IsMember({"random", "warm"}));
    cmd->add_option("--relax", a.relax_levels,
                    "relaxation level(s): soc-basis soc-rand sdp-3x3 "
                    "sdp-full socp-diag")
        ->envname("SMKL_RELAX");
    cmd->add_option("--rand-vectors", a.rand_vectors,
                    "sample count for soc-rand")
        ->envname("SMKL_RAND_VECTORS");
  }
}

std::string now_iso() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::vector<KernelSpec> load_specs(const CommonArgs& a) {
  if (a.kernels_path.empty()) return default_kernel_specs();
  return load_kernel_config(a.kernels_path);
}

SmklConfig make_config(const CommonArgs& a) {
  SmklConfig c;
  c.C = a.C;
  c.lambda = a.lambda;
  c.k0 = a.k0;
  c.eps = a.eps;
  c.patience = a.patience;
  c.max_iter = a.max_iter;
  c.seed = a.seed;
  return c;
}

ConicProgram build_level(RelaxationLevel level, const KernelBank& bank,
                         const Eigen::VectorXd& y, const SmklConfig& c,
                         int rand_vectors, std::uint64_t seed) {
  switch (level) {
    case RelaxationLevel::SocBasis:
      return build_soc_basis(bank, y, c.C, c.lambda, c.k0);
    case RelaxationLevel::SocRandomized:
      return build_soc_randomized(bank, y, c.C, c.lambda, c.k0, rand_vectors,
                                  seed);
    case RelaxationLevel::Sdp3x3:
      return build_sdp_3x3(bank, y, c.C, c.lambda, c.k0);
    case RelaxationLevel::SdpFull:
      return build_full_sdp(bank, y, c.C, c.lambda, c.k0);
    case RelaxationLevel::SocpDiagonal: {
      // Recover a shared eigenbasis from the bank sum; build_socp_diagonal
      // verifies it actually diagonalizes every member.
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(bank.n(), bank.n());
      for (int i = 0; i < bank.q(); ++i) sum += bank[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum);
      Eigen::MatrixXd U = es.eigenvectors();
      std::vector<Eigen::VectorXd> diagonals;
      for (int i = 0; i < bank.q(); ++i)
        diagonals.push_back((U.transpose() * bank[i] * U).diagonal());
      return build_socp_diagonal(bank, y, c.C, c.lambda, c.k0, U, diagonals);
    }
  }
  throw InputError("unknown relaxation level");
}

std::vector<CertificationEntry> certify_levels(
    const std::vector<std::string>& names, const KernelBank& bank,
    const Eigen::VectorXd& y, const SmklConfig& c, double upper,
    int rand_vectors, std::uint64_t seed, double mem_budget_mb) {
  std::vector<CertificationEntry> entries;
  SolverOptions opts;
  opts.mem_budget_mb = mem_budget_mb;
  for (const auto& name : names) {
    RelaxationLevel level = relaxation_from_name(name);
    CertificationEntry e;
    e.level = name;
    try {
      ConicProgram prog = build_level(level, bank, y, c, rand_vectors, seed);
      RelaxationOutcome out = solve_relaxation(prog, level, opts);
      GapReport gap = certify_gap(upper, out.lower_bound, 1e-4);
      e.available = true;
      e.lower_bound = out.lower_bound;
      e.upper_bound = upper;
      e.gap_over_upper = gap.gap_over_upper;
      e.gap_over_lower = gap.gap_over_lower;
      e.globally_optimal =
          std::abs(upper - out.lower_bound) <= 1e-4 * (1.0 + std::abs(upper));
      e.status = status_name(out.status);
      e.primal_residual = out.primal_residual;
      e.dual_residual = out.dual_residual;
      e.wall_time_sec = out.wall_time_sec;
    } catch (const CapacityError& err) {
      e.available = false;  // Table's "--" semantics: record and move on
      e.note = err.what();
    } catch (const InputError& err) {
      e.available = false;
      e.note = err.what();
    }
    entries.push_back(e);
  }
  return entries;
}

void emit(const CommonArgs& a, RunReport& report) {
  report.timestamp = now_iso();
  if (a.out_path.empty())
    write_report(std::cout, report);
  else
    write_report_file(a.out_path, report);
}

SmklResult run_fit(const CommonArgs& a, const KernelBank& bank,
                   const Eigen::VectorXd& y, SmklConfig& config) {
  if (a.init == "warm") {
    std::string level_name =
        a.relax_levels.empty() ? "sdp-full" : a.relax_levels.front();
    RelaxationLevel level = relaxation_from_name(level_name);
    SolverOptions opts;
    opts.mem_budget_mb = a.mem_budget_mb;
    ConicProgram prog =
        build_level(level, bank, y, config, a.rand_vectors, a.seed);
    RelaxationOutcome out = solve_relaxation(prog, level, opts);
    config.init = InitStrategy::WarmStart;
    config.warm_start = extract_warm_start(out, config.k0);
  }
  return fit(bank, y, config);
}

int cmd_train(const CommonArgs& a) {
  auto t0 = std::chrono::steady_clock::now();
  DataSchema schema = DataSchema::load(a.schema_path);
  RawDataset raw = load_csv(a.data_path, schema);
  SplitDataset split = split_standardize(raw, a.seed);
  std::vector<KernelSpec> specs = load_specs(a);
  KernelBank bank = build_bank(specs, split.train.X);

  SmklConfig config = make_config(a);
  auto fit_start = std::chrono::steady_clock::now();
  SmklResult model = run_fit(a, bank, split.train.y, config);
  double fit_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    fit_start)
          .count();
  EvalReport eval = evaluate(model, specs, split, config, fit_time);

  RunReport report;
  report.command = "train";
  report.dataset = a.data_path;
  report.kernel_config = a.kernels_path.empty() ? "default10" : a.kernels_path;
  report.config = config;
  report.split_seed = a.seed;
  report.beta = model.beta.beta;
  for (Eigen::Index i = 0; i < model.beta.beta.size(); ++i)
    if (model.beta.beta[i] != 0.0) report.support.push_back(static_cast<int>(i));
  report.accuracy = eval.accuracy;
  report.nnz_beta = eval.nnz_beta;
  report.trace = model.objective_trace;
  report.best_objective = model.best_objective;
  report.iterations_run = model.iterations_run;
  report.stop_reason =
      model.stop_reason == StopReason::Stalled ? "stalled" : "max_iter";
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  emit(a, report);
  return 0;
}

int cmd_certify(const CommonArgs& a) {
  auto t0 = std::chrono::steady_clock::now();
  DataSchema schema = DataSchema::load(a.schema_path);
  RawDataset raw = load_csv(a.data_path, schema);
  SplitDataset split = split_standardize(raw, a.seed);
  std::vector<KernelSpec> specs = load_specs(a);
  KernelBank bank = build_bank(specs, split.train.X);

  SmklConfig config = make_config(a);
  SmklResult model = fit(bank, split.train.y, config);
  // The certified upper bound is the value of the returned feasible weights,
  // i.e. the dual optimum at beta plus the l2 penalty.
  GramMatrix Kc = combine(bank, model.beta.beta);
  DualSolution at_beta = solve_dual(Kc, split.train.y, config.C, config.kkt_tol);
  double upper =
      at_beta.dual_objective + config.lambda * model.beta.beta.squaredNorm();

  std::vector<std::string> levels = a.relax_levels;
  if (levels.empty()) levels = {"soc-basis", "soc-rand", "sdp-3x3", "sdp-full"};

  RunReport report;
  report.command = "certify";
  report.dataset = a.data_path;
  report.kernel_config = a.kernels_path.empty() ? "default10" : a.kernels_path;
  report.config = config;
  report.split_seed = a.seed;
  report.beta = model.beta.beta;
  for (Eigen::Index i = 0; i < model.beta.beta.size(); ++i)
    if (model.beta.beta[i] != 0.0) report.support.push_back(static_cast<int>(i));
  report.best_objective = upper;
  report.iterations_run = model.iterations_run;
  report.stop_reason =
      model.stop_reason == StopReason::Stalled ? "stalled" : "max_iter";
  report.certification =
      certify_levels(levels, bank, split.train.y, config, upper,
                     a.rand_vectors, a.seed, a.mem_budget_mb);
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  emit(a, report);
  return 0;
}

struct CvArgs {
  std::vector<double> grid_C;
  std::vector<double> grid_lambda;
  std::vector<int> grid_k0;
  int folds = 10;
  std::string cv_log;
};

int cmd_cv(const CommonArgs& a, const CvArgs& g) {
  auto t0 = std::chrono::steady_clock::now();
  DataSchema schema = DataSchema::load(a.schema_path);
  RawDataset raw = load_csv(a.data_path, schema);
  SplitDataset split = split_standardize(raw, a.seed);
  std::vector<KernelSpec> specs = load_specs(a);

  CvGrid grid = CvGrid::defaults();
  if (!g.grid_C.empty()) grid.C_values = g.grid_C;
  if (!g.grid_lambda.empty()) grid.lambda_values = g.grid_lambda;
  if (!g.grid_k0.empty()) grid.k0_values = g.grid_k0;
  grid.folds = g.folds;

  CvResult cv = cross_validate(split.train, specs, grid, a.seed, a.threads);
  if (!g.cv_log.empty()) write_cv_log(g.cv_log, cv);
  for (const auto& w : cv.warnings) std::cerr << "warning: " << w << "\n";

  KernelBank bank = build_bank(specs, split.train.X);
  auto fit_start = std::chrono::steady_clock::now();
  SmklResult model = fit(bank, split.train.y, cv.best);
  double fit_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    fit_start)
          .count();
  EvalReport eval = evaluate(model, specs, split, cv.best, fit_time);

  RunReport report;
  report.command = "cv";
  report.dataset = a.data_path;
  report.kernel_config = a.kernels_path.empty() ? "default10" : a.kernels_path;
  report.config = cv.best;
  report.split_seed = a.seed;
  report.beta = model.beta.beta;
  for (Eigen::Index i = 0; i < model.beta.beta.size(); ++i)
    if (model.beta.beta[i] != 0.0) report.support.push_back(static_cast<int>(i));
  report.accuracy = eval.accuracy;
  report.nnz_beta = eval.nnz_beta;
  report.trace = model.objective_trace;
  report.best_objective = model.best_objective;
  report.iterations_run = model.iterations_run;
  report.stop_reason =
      model.stop_reason == StopReason::Stalled ? "stalled" : "max_iter";
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  emit(a, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse multiple kernel learning: train, certify, cross-validate"};
  app.require_subcommand(1);

  CommonArgs train_args, certify_args, cv_args_common;
  CvArgs cv_args;

  CLI::App* train = app.add_subcommand("train", "fit a sparse kernel mix");
  add_common(train, train_args, true);

  CLI::App* certify = app.add_subcommand(
      "certify", "lower-bound the heuristic solution via conic relaxations");
  add_common(certify, certify_args, true);

  CLI::App* cv = app.add_subcommand("cv", "grid-search (C, lambda, k0)");
  add_common(cv, cv_args_common, false);
  cv->add_option("--grid-c", cv_args.grid_C, "C grid");
  cv->add_option("--grid-lambda", cv_args.grid_lambda, "lambda grid");
  cv->add_option("--grid-k0", cv_args.grid_k0, "k0 grid");
  cv->add_option("--folds", cv_args.folds, "fold count");
  cv->add_option("--cv-log", cv_args.cv_log, "per-grid-point CSV audit log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (certify->parsed()) return cmd_certify(certify_args);
    if (cv->parsed()) return cmd_cv(cv_args_common, cv_args);
  } catch (const smkl::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
