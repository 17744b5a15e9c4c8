#include "smkl/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace smkl {

int KernelWeights::nnz(double tol) const {
  int count = 0;
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (std::abs(beta[i]) > tol) ++count;
  return count;
}

void KernelWeights::validate() const {
  if (k0 < 1) throw InputError("k0 must be >= 1");
  if (beta.minCoeff() < 0.0) throw InputError("beta must be nonnegative");
  if (std::abs(beta.sum() - 1.0) > 1e-10)
    throw InputError("beta must sum to 1");
  if (nnz() > k0) throw InputError("beta exceeds sparsity budget");
}

Eigen::VectorXd margin_vector(const KernelBank& bank, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& alpha) {
  bank.validate();
  if (y.size() != bank.n() || alpha.size() != bank.n())
    throw InputError("margin_vector: dimension mismatch");
  Eigen::VectorXd v = y.cwiseProduct(alpha);
  Eigen::VectorXd d(bank.q());
  for (int i = 0; i < bank.q(); ++i) d[i] = v.dot(bank[i] * v);
  return d;
}

KernelWeights gssp_project(const Eigen::VectorXd& w, int k0) {
  const int q = static_cast<int>(w.size());
  if (k0 < 1 || k0 > q) throw InputError("gssp_project: need 1 <= k0 <= q");
  if (!w.allFinite()) throw InputError("gssp_project: w must be finite");

  // Top-k selection, stable by (value desc, index asc).
  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (w[a] != w[b]) return w[a] > w[b];
    return a < b;
  });
  // order[0..k0) is the support; entries are already descending for the
  // simplex projection step.
  double running = 0.0;
  int rho = 0;
  double tau = 0.0;
  for (int j = 0; j < k0; ++j) {
    double wj = w[order[j]];
    running += wj;
    double candidate = (running - 1.0) / (j + 1);
    if (wj > candidate) {
      rho = j + 1;
      tau = candidate;
    }
  }
  // rho >= 1 always: for j=0 the test reads w(1) > w(1) - 1.

  KernelWeights out;
  out.k0 = k0;
  out.beta = Eigen::VectorXd::Zero(q);
  for (int j = 0; j < k0; ++j)
    out.beta[order[j]] = std::max(w[order[j]] - tau, 0.0);
  return out;
}

KernelWeights beta_best_response(const KernelBank& bank, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& alpha, double lambda,
                                 int k0) {
  if (lambda <= 0.0) throw InputError("lambda must be positive");
  Eigen::VectorXd d = margin_vector(bank, y, alpha);
  return gssp_project(d / (4.0 * lambda), k0);
}

}  // namespace smkl
