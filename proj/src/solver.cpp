#include "smkl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace smkl {

void SmklConfig::validate(int q) const {
  if (C <= 0.0) throw InputError("C must be positive");
  if (lambda <= 0.0) throw InputError("lambda must be positive");
  if (k0 < 1 || k0 > q) throw InputError("need 1 <= k0 <= q");
  if (eps <= 0.0) throw InputError("eps must be positive");
  if (patience < 1) throw InputError("patience M must be >= 1");
  if (max_iter < 1) throw InputError("max_iter T must be >= 1");
  if (init == InitStrategy::WarmStart && !warm_start)
    throw InputError("warm start selected but no weights provided");
}

double objective_J(const KernelBank& bank, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                   double lambda) {
  GramMatrix K = combine(bank, beta);
  return dual_objective(K.entries, y, alpha) + lambda * beta.squaredNorm();
}

KernelWeights init_ksparse_random(int q, int k0, std::uint64_t seed) {
  if (k0 < 1 || k0 > q) throw InputError("need 1 <= k0 <= q");
  std::vector<int> idx(q);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (int j = 0; j < k0; ++j) {
    std::uniform_int_distribution<int> pick(j, q - 1);
    std::swap(idx[j], idx[pick(rng)]);
  }
  KernelWeights w;
  w.k0 = k0;
  w.beta = Eigen::VectorXd::Zero(q);
  for (int j = 0; j < k0; ++j) w.beta[idx[j]] = 1.0 / k0;
  return w;
}

SmklResult fit(const KernelBank& bank, const Eigen::VectorXd& y,
               const SmklConfig& config) {
  bank.validate();
  config.validate(bank.q());
  if (y.size() != bank.n()) throw InputError("fit: label dimension mismatch");

  KernelWeights beta = config.init == InitStrategy::WarmStart
                           ? *config.warm_start
                           : init_ksparse_random(bank.q(), config.k0, config.seed);
  beta.validate();
  if (beta.beta.size() != bank.q())
    throw InputError("fit: warm-start dimension mismatch");

  SmklResult result;
  double obj_best = std::numeric_limits<double>::infinity();
  int non_decrease = 0;
  DualSolution saved_alpha;
  KernelWeights saved_beta = beta;
  bool saved = false;
  result.stop_reason = StopReason::MaxIter;

  for (int t = 1; t <= config.max_iter; ++t) {
    GramMatrix K = combine(bank, beta.beta);
    DualSolution alpha = solve_dual(K, y, config.C, config.kkt_tol);
    beta = beta_best_response(bank, y, alpha.alpha, config.lambda, config.k0);
    double J = objective_J(bank, y, alpha.alpha, beta.beta, config.lambda);

    if (obj_best - J < config.eps) {
      ++non_decrease;
    } else {
      non_decrease = 0;
      obj_best = J;
      saved_alpha = alpha;
      saved_beta = beta;
      saved = true;
    }
    result.objective_trace.push_back({t, J, non_decrease});
    result.iterations_run = t;
    if (non_decrease >= config.patience) {
      result.stop_reason = StopReason::Stalled;
      break;
    }
  }

  if (!saved) {
    // No strict improvement was ever recorded (possible only if J never
    // dropped below +inf - eps, i.e. never); keep the last iterate.
    GramMatrix K = combine(bank, saved_beta.beta);
    saved_alpha = solve_dual(K, y, config.C, config.kkt_tol);
    obj_best = objective_J(bank, y, saved_alpha.alpha, saved_beta.beta,
                           config.lambda);
  }
  result.alpha = saved_alpha;
  result.beta = saved_beta;
  result.best_objective = obj_best;
  return result;
}

ConvergenceCondition check_linear_convergence_condition(const KernelBank& bank,
                                                        double C, double lambda,
                                                        int k0) {
  bank.validate();
  double max_top = -std::numeric_limits<double>::infinity();
  double min_bottom = std::numeric_limits<double>::infinity();
  for (int i = 0; i < bank.q(); ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bank[i],
                                                      Eigen::EigenvaluesOnly);
    max_top = std::max(max_top, es.eigenvalues().maxCoeff());
    min_bottom = std::min(min_bottom, es.eigenvalues().minCoeff());
  }
  if (min_bottom <= 0.0)
    throw NumericalError("convergence condition requires positive definite kernels");
  ConvergenceCondition cc;
  cc.lhs = C * C * static_cast<double>(bank.n()) * k0 * max_top * max_top;
  cc.rhs = 2.0 * lambda * min_bottom;
  cc.holds = cc.lhs < cc.rhs;
  cc.rate = cc.lhs / cc.rhs;
  return cc;
}

}  // namespace smkl
