#pragma once

// Shared fixtures for the test binaries: deterministic random instances and
// independent oracles used to cross-check the production solvers.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "smkl/conic.hpp"
#include "smkl/kernels.hpp"
#include "smkl/svm.hpp"

namespace smkl::testing {

// Balanced +-1 labels, shuffled.
inline Eigen::VectorXd random_labels(Eigen::Index n, std::mt19937_64& rng) {
  std::vector<double> lab(n, 1.0);
  for (Eigen::Index i = n / 2; i < n; ++i) lab[i] = -1.0;
  std::shuffle(lab.begin(), lab.end(), rng);
  return Eigen::Map<Eigen::VectorXd>(lab.data(), n);
}

// Random PSD Gram matrix A A^T / n, unit-ish diagonal, plus a small ridge.
inline GramMatrix random_psd_gram(Eigen::Index n, std::mt19937_64& rng,
                                  double ridge = 1e-6) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = gauss(rng);
  GramMatrix g;
  g.entries = (A * A.transpose()) / static_cast<double>(n);
  g.entries.diagonal().array() += ridge;
  g.jitter = ridge;
  g.source = "random-psd";
  return g;
}

inline KernelBank random_bank(Eigen::Index n, int q, std::mt19937_64& rng) {
  KernelBank bank;
  for (int i = 0; i < q; ++i) bank.kernels.push_back(random_psd_gram(n, rng));
  return bank;
}

// Two-cluster feature matrix whose labels match the cluster; linearly
// separable after standardization.
inline Eigen::MatrixXd blob_features(const Eigen::VectorXd& y, int dim,
                                     std::mt19937_64& rng, double spread = 0.4) {
  std::normal_distribution<double> gauss(0.0, spread);
  Eigen::MatrixXd X(y.size(), dim);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    for (int j = 0; j < dim; ++j) X(i, j) = 2.0 * y[i] + gauss(rng);
  return X;
}

// Exact Euclidean projection of w onto the unit simplex by bisection on the
// shift tau. Independent of the sort-based production routine.
inline Eigen::VectorXd simplex_project_bisect(const Eigen::VectorXd& w) {
  double lo = w.minCoeff() - 1.0, hi = w.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    double tau = 0.5 * (lo + hi);
    double mass = (w.array() - tau).max(0.0).sum();
    (mass > 1.0 ? lo : hi) = tau;
  }
  double tau = 0.5 * (lo + hi);
  return (w.array() - tau).max(0.0);
}

// Brute-force oracle for the sparse simplex projection: enumerate every
// support of size k0 and keep the closest simplex projection.
inline Eigen::VectorXd sparse_simplex_oracle(const Eigen::VectorXd& w, int k0,
                                             double* best_dist = nullptr) {
  const int q = static_cast<int>(w.size());
  const int k = std::min(k0, q);
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  Eigen::VectorXd best = Eigen::VectorXd::Zero(q);
  double best_d = std::numeric_limits<double>::infinity();
  while (true) {
    Eigen::VectorXd sub(k);
    for (int i = 0; i < k; ++i) sub[i] = w[idx[i]];
    Eigen::VectorXd proj = simplex_project_bisect(sub);
    Eigen::VectorXd full = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < k; ++i) full[idx[i]] = proj[i];
    double d = (full - w).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = full;
    }
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == q - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  if (best_dist != nullptr) *best_dist = best_d;
  return best;
}

// Interior-point oracle for the SVM dual: rewrites
//   max sum(alpha) - 1/2 alpha' Q alpha,  0 <= alpha <= C,  y'alpha = 0
// as a rotated-SOC program over (alpha, t) with t >= 1/2 alpha' Q alpha.
// Completely separate code path from the SMO ascent.
inline double dual_qp_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                             double C) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd Q = y.asDiagonal() * K * y.asDiagonal();
  Q.diagonal().array() += 1e-12;
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  Eigen::MatrixXd L = llt.matrixL();
  ConicProgram prog;
  int a0 = prog.add_variables("alpha", static_cast<int>(n));
  int t0 = prog.add_variables("t", 1);
  LinExpr obj = LinExpr::var(t0);
  for (Eigen::Index i = 0; i < n; ++i) obj += LinExpr::var(a0 + static_cast<int>(i), -1.0);
  prog.set_objective(obj);
  LinExpr bal;
  for (Eigen::Index i = 0; i < n; ++i) {
    bal += LinExpr::var(a0 + static_cast<int>(i), y[i]);
    prog.add_nonneg(LinExpr::var(a0 + static_cast<int>(i)));
    prog.add_nonneg(LinExpr(C) - LinExpr::var(a0 + static_cast<int>(i)));
  }
  prog.add_zero(bal);
  std::vector<LinExpr> w;
  for (Eigen::Index r = 0; r < n; ++r) {
    LinExpr row;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(L(j, r)) > 0.0) row += LinExpr::var(a0 + static_cast<int>(j), L(j, r));
    w.push_back(row);
  }
  prog.add_rotated_soc(LinExpr::var(t0), LinExpr(1.0), w);
  ConicSolution sol = solve(prog);
  return -sol.primal_obj;
}

}  // namespace smkl::testing
