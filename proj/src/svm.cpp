#include "smkl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smkl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_labels(const Eigen::VectorXd& y) {
  bool has_pos = false, has_neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0)
      has_pos = true;
    else if (y[i] == -1.0)
      has_neg = true;
    else
      throw InputError("labels must be -1 or +1");
  }
  if (!has_pos || !has_neg)
    throw InputError("both classes required: equality constraint infeasible");
}

void check_conditioning(const Eigen::MatrixXd& K) {
  // Cheap PSD screen; a full eigensolve at every call would dominate fit().
  if (K.rows() > 2000) return;
  double scale = 1.0 + K.diagonal().cwiseAbs().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(
      K + 1e-8 * scale * Eigen::MatrixXd::Identity(K.rows(), K.cols()));
  if (llt.info() != Eigen::Success)
    throw NumericalError("kernel matrix is not PSD within tolerance");
}

}  // namespace

void TrainingSet::validate() const {
  if (X.rows() != y.size()) throw InputError("feature/label count mismatch");
  if (!X.allFinite()) throw InputError("features contain non-finite values");
  check_labels(y);
}

double dual_objective(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& alpha) {
  if (K.rows() != y.size() || alpha.size() != y.size())
    throw InputError("dual_objective: dimension mismatch");
  Eigen::VectorXd v = y.cwiseProduct(alpha);
  return alpha.sum() - 0.5 * v.dot(K * v);
}

DualSolution solve_dual(const GramMatrix& Kg, const Eigen::VectorXd& y, double C,
                        double kkt_tol, long max_iter) {
  const Eigen::MatrixXd& K = Kg.entries;
  const Eigen::Index n = y.size();
  if (K.rows() != n || K.cols() != n)
    throw InputError("solve_dual: kernel/label dimension mismatch");
  check_labels(y);
  if (C < 0.0) throw InputError("C must be nonnegative");

  DualSolution sol;
  sol.alpha = Eigen::VectorXd::Zero(n);
  if (C == 0.0) {
    sol.dual_objective = 0.0;
    return sol;
  }
  check_conditioning(K);

  // Minimize 1/2 a'Qa - sum(a) with Q = diag(y) K diag(y).
  // grad_i = (Q a)_i - 1; maximal-violating-pair selection on -y.*grad.
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  long iters = 0;
  double residual = kInf;
  while (iters < max_iter) {
    Eigen::Index i = -1, j = -1;
    double up_best = -kInf, low_best = kInf;
    for (Eigen::Index t = 0; t < n; ++t) {
      double v = -y[t] * grad[t];
      bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
      bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
      if (in_up && v > up_best) { up_best = v; i = t; }
      if (in_low && v < low_best) { low_best = v; j = t; }
    }
    residual = (i >= 0 && j >= 0) ? up_best - low_best : 0.0;
    if (residual <= kkt_tol || i < 0 || j < 0) break;

    // Feasible direction alpha_i += y_i*t, alpha_j -= y_j*t.
    double quad = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), 1e-12);
    double deriv = y[i] * grad[i] - y[j] * grad[j];
    double step = -deriv / quad;

    double lo = -kInf, hi = kInf;
    if (y[i] > 0) { lo = std::max(lo, -alpha[i]); hi = std::min(hi, C - alpha[i]); }
    else          { lo = std::max(lo, alpha[i] - C); hi = std::min(hi, alpha[i]); }
    if (y[j] > 0) { lo = std::max(lo, alpha[j] - C); hi = std::min(hi, alpha[j]); }
    else          { lo = std::max(lo, -alpha[j]); hi = std::min(hi, C - alpha[j]); }
    step = std::clamp(step, lo, hi);
    if (step == 0.0) break;  // numerically blocked pair

    alpha[i] += y[i] * step;
    alpha[j] -= y[j] * step;
    alpha[i] = std::clamp(alpha[i], 0.0, C);
    alpha[j] = std::clamp(alpha[j], 0.0, C);
    grad += step * y.cwiseProduct(K.col(i) - K.col(j));
    ++iters;
  }

  sol.alpha = alpha;
  sol.iterations = iters;
  sol.kkt_residual = std::max(residual, 0.0);
  sol.dual_objective = dual_objective(K, y, alpha);

  const double bound_tol = 1e-10 * std::max(1.0, C);
  double bias_sum = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha[t] > bound_tol && alpha[t] < C - bound_tol) {
      bias_sum += -y[t] * grad[t];
      ++n_free;
    }
    if (alpha[t] > bound_tol) sol.support_indices.push_back(t);
  }
  if (n_free > 0) {
    sol.bias = bias_sum / n_free;
  } else {
    // Midpoint-of-bounds rule over the violating-pair quantities.
    double up_best = -kInf, low_best = kInf;
    for (Eigen::Index t = 0; t < n; ++t) {
      double v = -y[t] * grad[t];
      if ((y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0))
        up_best = std::max(up_best, v);
      if ((y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C))
        low_best = std::min(low_best, v);
    }
    sol.bias = (std::isfinite(up_best) && std::isfinite(low_best))
                   ? (up_best + low_best) / 2.0
                   : 0.0;
  }
  return sol;
}

Eigen::VectorXd decision_values(const DualSolution& model,
                                const Eigen::MatrixXd& K_cross,
                                const Eigen::VectorXd& y) {
  if (K_cross.rows() != model.alpha.size() || y.size() != model.alpha.size())
    throw InputError("decision_values: dimension mismatch");
  Eigen::VectorXd coef = model.alpha.cwiseProduct(y);
  return (K_cross.transpose() * coef).array() + model.bias;
}

Eigen::VectorXd predict_labels(const Eigen::VectorXd& decision) {
  Eigen::VectorXd out(decision.size());
  for (Eigen::Index i = 0; i < decision.size(); ++i)
    out[i] = decision[i] < 0.0 ? -1.0 : 1.0;
  return out;
}

}  // namespace smkl
