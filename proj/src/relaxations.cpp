#include "smkl/relaxations.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace smkl {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

std::string relaxation_name(RelaxationLevel level) {
  switch (level) {
    case RelaxationLevel::SocBasis: return "soc-basis";
    case RelaxationLevel::SocRandomized: return "soc-rand";
    case RelaxationLevel::Sdp3x3: return "sdp-3x3";
    case RelaxationLevel::SdpFull: return "sdp-full";
    case RelaxationLevel::SocpDiagonal: return "socp-diag";
  }
  return "?";
}

RelaxationLevel relaxation_from_name(const std::string& name) {
  if (name == "soc-basis") return RelaxationLevel::SocBasis;
  if (name == "soc-rand") return RelaxationLevel::SocRandomized;
  if (name == "sdp-3x3") return RelaxationLevel::Sdp3x3;
  if (name == "sdp-full") return RelaxationLevel::SdpFull;
  if (name == "socp-diag") return RelaxationLevel::SocpDiagonal;
  throw InputError("unknown relaxation level: " + name);
}

namespace {

struct BaseSlices {
  int eta, theta, sigma, gamma, beta, omega, z;
  int n, q;
};

// Shared scaffolding of every relaxation in the hierarchy: all variables and
// constraints except the theta-gamma coupling.
BaseSlices build_base(ConicProgram& prog, const KernelBank& bank,
                      const Eigen::VectorXd& y, double C, double lambda,
                      int k0) {
  bank.validate();
  const int n = static_cast<int>(bank.n());
  const int q = bank.q();
  if (y.size() != n) throw InputError("label vector length mismatch");
  if (C < 0.0) throw InputError("C must be nonnegative");
  if (lambda < 0.0) throw InputError("lambda must be nonnegative");
  if (k0 < 1 || k0 > q) throw InputError("k0 must lie in [1, q]");

  BaseSlices s;
  s.n = n;
  s.q = q;
  s.eta = prog.add_variables("eta", 1);
  s.theta = prog.add_variables("theta", 1);
  s.sigma = prog.add_variables("sigma", n);
  s.gamma = prog.add_variables("gamma", n);
  s.beta = prog.add_variables("beta", q);
  s.omega = prog.add_variables("omega", q);
  s.z = prog.add_variables("z", q);

  LinExpr obj;
  for (int i = 0; i < n; ++i) obj += LinExpr::var(s.sigma + i, C);
  obj += LinExpr::var(s.theta, 0.5);
  for (int i = 0; i < q; ++i) obj += LinExpr::var(s.omega + i, lambda);
  prog.set_objective(obj);

  for (int i = 0; i < n; ++i) {
    prog.add_nonneg(LinExpr::var(s.sigma + i));
    // y_i (eta + gamma_i) + sigma_i - 1 >= 0
    LinExpr hinge = LinExpr::var(s.eta, y[i]);
    hinge += LinExpr::var(s.gamma + i, y[i]);
    hinge += LinExpr::var(s.sigma + i);
    hinge.constant -= 1.0;
    prog.add_nonneg(hinge);
  }

  LinExpr simplex;
  for (int i = 0; i < q; ++i) {
    prog.add_nonneg(LinExpr::var(s.beta + i));
    simplex += LinExpr::var(s.beta + i);
  }
  simplex.constant -= 1.0;
  prog.add_zero(simplex);

  LinExpr card;
  card.constant = static_cast<double>(k0);
  for (int i = 0; i < q; ++i) {
    LinExpr cap = LinExpr::var(s.z + i, -1.0);
    cap.constant += 1.0;
    prog.add_nonneg(cap);  // z_i <= 1
    card -= LinExpr::var(s.z + i);
    // beta_i^2 <= z_i omega_i as a rotated cone (z_i >= 0, omega_i >= 0
    // come with membership).
    prog.add_rotated_soc(LinExpr::var(s.z + i), LinExpr::var(s.omega + i),
                         {LinExpr::var(s.beta + i, kSqrt2)});
  }
  prog.add_nonneg(card);  // sum z <= k0
  return s;
}

// sum_i beta_i * coeff_i as a linear expression over the beta slice.
LinExpr beta_combo(const BaseSlices& s, const Eigen::VectorXd& coeffs) {
  LinExpr e;
  for (int i = 0; i < s.q; ++i)
    if (coeffs[i] != 0.0) e += LinExpr::var(s.beta + i, coeffs[i]);
  return e;
}

Eigen::VectorXd entry_coeffs(const KernelBank& bank, int j, int k) {
  Eigen::VectorXd c(bank.q());
  for (int i = 0; i < bank.q(); ++i) c[i] = bank[i](j, k);
  return c;
}

void pin(ConicProgram& prog, int start, const Eigen::VectorXd& values) {
  for (int i = 0; i < values.size(); ++i) {
    LinExpr e = LinExpr::var(start + i);
    e.constant -= values[i];
    prog.add_zero(e);
  }
}

}  // namespace

ConicProgram build_full_sdp(const KernelBank& bank, const Eigen::VectorXd& y,
                            double C, double lambda, int k0,
                            const std::optional<Eigen::VectorXd>& fixed_z,
                            const std::optional<Eigen::VectorXd>& fixed_beta) {
  ConicProgram prog;
  BaseSlices s = build_base(prog, bank, y, C, lambda, k0);
  const int n = s.n;

  std::vector<std::vector<LinExpr>> M(n + 1, std::vector<LinExpr>(n + 1));
  M[0][0] = LinExpr::var(s.theta);
  for (int j = 0; j < n; ++j) {
    M[0][j + 1] = LinExpr::var(s.gamma + j);
    M[j + 1][0] = M[0][j + 1];
    for (int k = j; k < n; ++k) {
      LinExpr e = beta_combo(s, entry_coeffs(bank, j, k));
      M[j + 1][k + 1] = e;
      M[k + 1][j + 1] = e;
    }
  }
  prog.add_psd(M);

  if (fixed_z) {
    if (fixed_z->size() != s.q) throw InputError("fixed z length mismatch");
    pin(prog, s.z, *fixed_z);
  }
  if (fixed_beta) {
    if (fixed_beta->size() != s.q) throw InputError("fixed beta length mismatch");
    pin(prog, s.beta, *fixed_beta);
  }
  return prog;
}

ConicProgram build_soc_basis(const KernelBank& bank, const Eigen::VectorXd& y,
                             double C, double lambda, int k0) {
  ConicProgram prog;
  BaseSlices s = build_base(prog, bank, y, C, lambda, k0);
  for (int j = 0; j < s.n; ++j)
    prog.add_rotated_soc(LinExpr::var(s.theta),
                         beta_combo(s, entry_coeffs(bank, j, j)),
                         {LinExpr::var(s.gamma + j, kSqrt2)});
  return prog;
}

ConicProgram build_soc_randomized(const KernelBank& bank,
                                  const Eigen::VectorXd& y, double C,
                                  double lambda, int k0, int num_random,
                                  std::uint64_t seed) {
  if (num_random < 0) throw InputError("num_random must be >= 0");
  ConicProgram prog;
  BaseSlices s = build_base(prog, bank, y, C, lambda, k0);
  const int n = s.n;
  for (int j = 0; j < n; ++j)
    prog.add_rotated_soc(LinExpr::var(s.theta),
                         beta_combo(s, entry_coeffs(bank, j, j)),
                         {LinExpr::var(s.gamma + j, kSqrt2)});

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < num_random; ++r) {
    Eigen::VectorXd x(n);
    do {
      for (int j = 0; j < n; ++j) x[j] = gauss(rng);
    } while (x.norm() < 1e-12);
    x.normalize();
    Eigen::VectorXd quad(s.q);
    for (int i = 0; i < s.q; ++i) quad[i] = x.dot(bank[i] * x);
    LinExpr proj;  // sqrt(2) * x' gamma
    for (int j = 0; j < n; ++j)
      proj += LinExpr::var(s.gamma + j, kSqrt2 * x[j]);
    prog.add_rotated_soc(LinExpr::var(s.theta), beta_combo(s, quad), {proj});
  }
  return prog;
}

ConicProgram build_sdp_3x3(const KernelBank& bank, const Eigen::VectorXd& y,
                           double C, double lambda, int k0) {
  ConicProgram prog;
  BaseSlices s = build_base(prog, bank, y, C, lambda, k0);
  const int n = s.n;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      std::vector<std::vector<LinExpr>> M(3, std::vector<LinExpr>(3));
      M[0][0] = LinExpr::var(s.theta);
      M[0][1] = LinExpr::var(s.gamma + j);
      M[1][0] = M[0][1];
      M[0][2] = LinExpr::var(s.gamma + k);
      M[2][0] = M[0][2];
      M[1][1] = beta_combo(s, entry_coeffs(bank, j, j));
      M[2][2] = beta_combo(s, entry_coeffs(bank, k, k));
      M[1][2] = beta_combo(s, entry_coeffs(bank, j, k));
      M[2][1] = M[1][2];
      prog.add_psd(M);
    }
  return prog;
}

ConicProgram build_socp_diagonal(const KernelBank& bank,
                                 const Eigen::VectorXd& y, double C,
                                 double lambda, int k0, const Eigen::MatrixXd& U,
                                 const std::vector<Eigen::VectorXd>& diagonals) {
  const int n = static_cast<int>(bank.n());
  if (U.rows() != n || U.cols() != n)
    throw InputError("U must be n x n");
  if (static_cast<int>(diagonals.size()) != bank.q())
    throw InputError("one diagonal per bank member required");
  if ((U.transpose() * U - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() >
      1e-8)
    throw InputError("U is not orthogonal");
  for (int i = 0; i < bank.q(); ++i) {
    if (diagonals[i].size() != n)
      throw InputError("diagonal length mismatch");
    Eigen::MatrixXd rebuilt = U * diagonals[i].asDiagonal() * U.transpose();
    if ((rebuilt - bank[i]).cwiseAbs().maxCoeff() > 1e-6)
      throw InputError("bank is not simultaneously diagonalizable by U");
  }

  ConicProgram prog;
  BaseSlices s = build_base(prog, bank, y, C, lambda, k0);
  int tau = prog.add_variables("tau", n);

  LinExpr theta_cover = LinExpr::var(s.theta);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd djj(s.q);
    for (int i = 0; i < s.q; ++i) djj[i] = diagonals[i][j];
    LinExpr proj;  // sqrt(2) * u_j' gamma
    for (int r = 0; r < n; ++r)
      proj += LinExpr::var(s.gamma + r, kSqrt2 * U(r, j));
    prog.add_rotated_soc(LinExpr::var(tau + j), beta_combo(s, djj), {proj});
    theta_cover -= LinExpr::var(tau + j);
  }
  prog.add_nonneg(theta_cover);  // theta >= sum tau
  return prog;
}

RelaxationOutcome solve_relaxation(const ConicProgram& prog,
                                   RelaxationLevel level,
                                   const SolverOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  ConicSolution sol = solve(prog, opts);
  auto t1 = std::chrono::steady_clock::now();

  RelaxationOutcome out;
  out.level = level;
  out.status = sol.status;
  out.lower_bound = sol.primal_obj;
  out.primal_residual = sol.primal_residual;
  out.dual_residual = sol.dual_residual;
  out.gap = sol.gap;
  out.iterations = sol.iterations;
  out.wall_time_sec = std::chrono::duration<double>(t1 - t0).count();
  out.vars.eta = sol.slice(prog, "eta")[0];
  out.vars.theta = sol.slice(prog, "theta")[0];
  out.vars.sigma = sol.slice(prog, "sigma");
  out.vars.gamma = sol.slice(prog, "gamma");
  out.vars.beta = sol.slice(prog, "beta");
  out.vars.omega = sol.slice(prog, "omega");
  out.vars.z = sol.slice(prog, "z");
  if (level == RelaxationLevel::SocpDiagonal)
    out.vars.tau = sol.slice(prog, "tau");
  return out;
}

KernelWeights extract_warm_start(const RelaxationOutcome& outcome, int k0) {
  const Eigen::VectorXd& z = outcome.vars.z;
  const Eigen::VectorXd& beta = outcome.vars.beta;
  const int q = static_cast<int>(z.size());
  if (k0 < 1 || k0 > q) throw InputError("k0 must lie in [1, q]");

  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (z[a] != z[b]) return z[a] > z[b];
    return a < b;
  });
  order.resize(k0);

  KernelWeights w;
  w.k0 = k0;
  w.beta = Eigen::VectorXd::Zero(q);
  double mass = 0.0;
  for (int i : order) mass += std::abs(beta[i]);
  if (mass <= 1e-12) {
    for (int i : order) w.beta[i] = 1.0 / k0;
  } else {
    for (int i : order) w.beta[i] = std::abs(beta[i]) / mass;
  }
  return w;
}

GapReport certify_gap(double upper, double lower, double tol) {
  if (!std::isfinite(upper) || !std::isfinite(lower))
    throw InputError("certify_gap requires finite bounds");
  if (lower > upper + tol * (1.0 + std::abs(upper)))
    throw NumericalError("lower bound exceeds upper bound: lower=" +
                         std::to_string(lower) + " upper=" +
                         std::to_string(upper));
  GapReport report;
  report.upper = upper;
  report.lower = lower;
  double diff = upper - lower;
  if (diff < 0.0) diff = 0.0;  // clamp tiny negative slack
  report.gap_over_upper = upper != 0.0 ? diff / upper * 100.0 : 0.0;
  report.gap_over_lower = lower != 0.0 ? diff / lower * 100.0 : 0.0;
  return report;
}

GlobalOptimum global_enumerate(const KernelBank& bank, const Eigen::VectorXd& y,
                               double C, double lambda, int k0, long budget,
                               const SolverOptions& opts) {
  const int q = bank.q();
  if (k0 < 1 || k0 > q) throw InputError("k0 must lie in [1, q]");
  // C(q, k0) against the budget.
  double count = 1.0;
  for (int i = 0; i < k0; ++i) count = count * (q - i) / (i + 1);
  if (count > static_cast<double>(budget))
    throw CapacityError("support enumeration needs " + std::to_string(count) +
                        " solves, budget " + std::to_string(budget));

  GlobalOptimum best;
  best.objective = std::numeric_limits<double>::infinity();

  std::vector<int> support(k0);
  std::iota(support.begin(), support.end(), 0);
  bool more = true;
  while (more) {
    Eigen::VectorXd zfix = Eigen::VectorXd::Zero(q);
    for (int i : support) zfix[i] = 1.0;
    ConicProgram prog = build_full_sdp(bank, y, C, lambda, k0, zfix);
    ConicSolution sol = solve(prog, opts);
    if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::MaxIter) {
      double obj = sol.primal_obj;
      if (obj < best.objective - 1e-12 ||
          (std::abs(obj - best.objective) <= 1e-12 && support < best.support)) {
        best.objective = obj;
        best.beta = sol.slice(prog, "beta");
        best.support = support;
      }
    }
    // Next lexicographic combination.
    int pos = k0 - 1;
    while (pos >= 0 && support[pos] == q - k0 + pos) --pos;
    if (pos < 0) {
      more = false;
    } else {
      ++support[pos];
      for (int i = pos + 1; i < k0; ++i) support[i] = support[i - 1] + 1;
    }
  }
  if (!std::isfinite(best.objective))
    throw NumericalError("support enumeration produced no usable solve");
  return best;
}

}  // namespace smkl
