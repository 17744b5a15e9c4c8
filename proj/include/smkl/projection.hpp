#pragma once

#include <Eigen/Dense>

#include "smkl/errors.hpp"
#include "smkl/kernels.hpp"

namespace smkl {

/// Simplex-constrained, k0-sparse mixing vector.
struct KernelWeights {
  Eigen::VectorXd beta;
  int k0 = 1;

  int nnz(double tol = 0.0) const;
  void validate() const;
};

/// d_i = (y o alpha)^T K_i (y o alpha).
Eigen::VectorXd margin_vector(const KernelBank& bank, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& alpha);

/// Euclidean projection of w onto {beta : ||beta||_0 <= k0} intersected with
/// the unit simplex, via top-k truncation followed by exact simplex
/// projection of the retained entries. Ties break by (value desc, index asc).
KernelWeights gssp_project(const Eigen::VectorXd& w, int k0);

/// Best response of the weight subproblem: gssp_project(d / (4 lambda), k0).
KernelWeights beta_best_response(const KernelBank& bank, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& alpha, double lambda,
                                 int k0);

}  // namespace smkl
