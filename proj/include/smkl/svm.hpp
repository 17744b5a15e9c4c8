#pragma once

#include <Eigen/Dense>
#include <vector>

#include "smkl/errors.hpp"
#include "smkl/kernels.hpp"

namespace smkl {

/// Labeled training data, features standardized upstream.
struct TrainingSet {
  Eigen::MatrixXd X;  // n x m
  Eigen::VectorXd y;  // entries in {-1, +1}

  Eigen::Index n() const { return y.size(); }
  void validate() const;
};

/// Solution of the SVM dual for a fixed combined kernel.
struct DualSolution {
  Eigen::VectorXd alpha;
  double bias = 0.0;
  double dual_objective = 0.0;
  std::vector<Eigen::Index> support_indices;
  // Solver statistics.
  long iterations = 0;
  double kkt_residual = 0.0;
};

/// sum alpha_i - 1/2 (y o alpha)^T K (y o alpha).
double dual_objective(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& alpha);

/// SMO solver for max_{0<=alpha<=C, y'alpha=0} of the dual above, using
/// maximal-violating-pair selection. Bias from averaged free support
/// vectors, midpoint rule when none exist.
DualSolution solve_dual(const GramMatrix& K, const Eigen::VectorXd& y, double C,
                        double kkt_tol = 1e-6, long max_iter = 10000000);

/// f(x_t) = sum_i alpha_i y_i K_cross(i, t) + b for each test column.
Eigen::VectorXd decision_values(const DualSolution& model,
                                const Eigen::MatrixXd& K_cross,
                                const Eigen::VectorXd& y);

/// sign(f) with ties mapped to +1.
Eigen::VectorXd predict_labels(const Eigen::VectorXd& decision);

}  // namespace smkl
