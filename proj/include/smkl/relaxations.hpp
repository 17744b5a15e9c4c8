#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "smkl/conic.hpp"
#include "smkl/kernels.hpp"
#include "smkl/projection.hpp"

namespace smkl {

enum class RelaxationLevel { SocBasis, SocRandomized, Sdp3x3, SdpFull, SocpDiagonal };

std::string relaxation_name(RelaxationLevel level);
RelaxationLevel relaxation_from_name(const std::string& name);

/// Optimal values of the shared relaxation variables.
struct RelaxedVars {
  double eta = 0.0;
  double theta = 0.0;
  Eigen::VectorXd sigma;
  Eigen::VectorXd gamma;
  Eigen::VectorXd beta;
  Eigen::VectorXd omega;
  Eigen::VectorXd z;
  Eigen::VectorXd tau;  // diagonal path only, empty otherwise
};

struct RelaxationOutcome {
  RelaxationLevel level = RelaxationLevel::SdpFull;
  int num_random = 0;        // SocRandomized only
  std::uint64_t seed = 0;    // SocRandomized only
  double lower_bound = 0.0;
  RelaxedVars vars;
  SolveStatus status = SolveStatus::MaxIter;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double wall_time_sec = 0.0;
};

struct GapReport {
  double upper = 0.0;           // heuristic objective F
  double lower = 0.0;           // best lower bound f_LB
  double gap_over_upper = 0.0;  // (F - f_LB)/F * 100, the definition
  double gap_over_lower = 0.0;  // (F - f_LB)/f_LB * 100, the table convention
};

/// Full SDP relaxation: variables (eta, theta, sigma>=0, gamma, beta>=0,
/// omega>=0, z in [0,1]) with the (n+1)x(n+1) PSD block
/// [[theta, gamma^T], [gamma, sum_i beta_i K_i]], sum beta = 1,
/// sum z <= k0, beta_i^2 <= z_i omega_i; objective C sum sigma + theta/2
/// + lambda sum omega. Optional pins fix z (support enumeration) and beta
/// (strong-duality checks) through equality constraints.
ConicProgram build_full_sdp(
    const KernelBank& bank, const Eigen::VectorXd& y, double C, double lambda,
    int k0, const std::optional<Eigen::VectorXd>& fixed_z = std::nullopt,
    const std::optional<Eigen::VectorXd>& fixed_beta = std::nullopt);

/// PSD block replaced by the n diagonal second-order rows
/// theta * sum_i beta_i [K_i]_jj >= gamma_j^2.
ConicProgram build_soc_basis(const KernelBank& bank, const Eigen::VectorXd& y,
                             double C, double lambda, int k0);

/// Basis rows plus one row theta * sum_i beta_i (x^T K_i x) >= (x^T gamma)^2
/// per sampled unit vector x (seeded Gaussian directions, normalized).
ConicProgram build_soc_randomized(const KernelBank& bank,
                                  const Eigen::VectorXd& y, double C,
                                  double lambda, int k0, int num_random,
                                  std::uint64_t seed);

/// All theta-anchored principal 3x3 minors, j < k, as PSD blocks.
ConicProgram build_sdp_3x3(const KernelBank& bank, const Eigen::VectorXd& y,
                           double C, double lambda, int k0);

/// Diagonal SOCP for a simultaneously diagonalizable bank K_i = U D_i U^T:
/// tau_j * sum_i beta_i [D_i]_jj >= (gamma^T u_j)^2 and theta >= sum tau.
ConicProgram build_socp_diagonal(const KernelBank& bank,
                                 const Eigen::VectorXd& y, double C,
                                 double lambda, int k0, const Eigen::MatrixXd& U,
                                 const std::vector<Eigen::VectorXd>& diagonals);

/// Solve a built relaxation and pull the named variable slices back out.
RelaxationOutcome solve_relaxation(const ConicProgram& prog,
                                   RelaxationLevel level,
                                   const SolverOptions& opts = {});

/// Support = k0 largest z entries (ties index asc); beta restricted there and
/// rescaled to unit l1 mass, uniform fallback when the mass is <= 1e-12.
KernelWeights extract_warm_start(const RelaxationOutcome& outcome, int k0);

/// Both gap conventions; throws NumericalError when lower > upper + tol.
GapReport certify_gap(double upper, double lower, double tol = 1e-6);

struct GlobalOptimum {
  double objective = 0.0;
  Eigen::VectorXd beta;
  std::vector<int> support;
};

/// Exact minimum of the cardinality-constrained problem by enumerating all
/// size-k0 supports and solving the fixed-support convex problem for each.
GlobalOptimum global_enumerate(const KernelBank& bank, const Eigen::VectorXd& y,
                               double C, double lambda, int k0,
                               long budget = 1000,
                               const SolverOptions& opts = {});

}  // namespace smkl
