#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "smkl/kernels.hpp"
#include "smkl/projection.hpp"
#include "smkl/svm.hpp"

namespace smkl {

enum class InitStrategy { KSparseRandom, WarmStart };

struct SmklConfig {
  double C = 1.0;
  double lambda = 1.0;
  int k0 = 1;
  double eps = 1e-6;   // improvement tolerance
  int patience = 3;    // M, consecutive non-improving iterations
  int max_iter = 100;  // T
  double kkt_tol = 1e-6;
  InitStrategy init = InitStrategy::KSparseRandom;
  std::uint64_t seed = 0;
  std::optional<KernelWeights> warm_start;

  void validate(int q) const;
};

enum class StopReason { MaxIter, Stalled };

struct TraceEntry {
  int iteration;
  double objective;
  int non_decrease;
};

struct SmklResult {
  DualSolution alpha;
  KernelWeights beta;
  std::vector<TraceEntry> objective_trace;
  double best_objective = 0.0;
  int iterations_run = 0;
  StopReason stop_reason = StopReason::MaxIter;
};

/// J = sum alpha_i - 1/2 (y o alpha)^T K(beta) (y o alpha) + lambda ||beta||^2.
double objective_J(const KernelBank& bank, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                   double lambda);

/// Uniform 1/k0 weights on a uniformly random size-k0 support.
KernelWeights init_ksparse_random(int q, int k0, std::uint64_t seed);

/// Alternating best response: SMO on K(beta), then GSSP on d/(4 lambda),
/// with saved-best bookkeeping and stall-based early stopping.
SmklResult fit(const KernelBank& bank, const Eigen::VectorXd& y,
               const SmklConfig& config);

struct ConvergenceCondition {
  bool holds;
  double lhs;   // C^2 n k0 (max_j lam_max(K_j))^2
  double rhs;   // 2 lambda min_j lam_min(K_j)
  double rate;  // lhs / rhs
};

/// Sufficient-condition checker for linear convergence of the alternation;
/// requires every bank member to be positive definite.
ConvergenceCondition check_linear_convergence_condition(const KernelBank& bank,
                                                        double C, double lambda,
                                                        int k0);

}  // namespace smkl
