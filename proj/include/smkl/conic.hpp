#pragma once

#include <Eigen/Dense>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "smkl/errors.hpp"

namespace smkl {

enum class ConeType { Zero, Nonneg, Soc, RotatedSoc, Psd };

std::string cone_name(ConeType t);

/// Sparse affine expression over the program's flat variable vector.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT: implicit by design
  static LinExpr var(int index, double coef = 1.0);

  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double scale);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
};

/// A conic program over a flat variable vector:
///   minimize  c'x  subject to  A_k x + b_k in cone_k  for each block k.
/// Psd blocks are stored in scaled-vectorized (svec) coordinates; use
/// add_psd to build them from a symmetric matrix of expressions.
class ConicProgram {
 public:
  struct Block {
    ConeType cone;
    int dim;  // vector length for vector cones, matrix side for Psd
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
  };

  int add_variables(const std::string& name, int count);
  std::pair<int, int> slice(const std::string& name) const;

  void set_objective(const LinExpr& expr);
  void add_objective_term(const LinExpr& expr);

  /// expr == 0.
  void add_zero(const LinExpr& expr);
  /// expr >= 0.
  void add_nonneg(const LinExpr& expr);
  /// rows[0] >= || rows[1..] ||_2.
  void add_soc(const std::vector<LinExpr>& rows);
  /// 2 * u * v >= || w ||^2, u >= 0, v >= 0.
  void add_rotated_soc(const LinExpr& u, const LinExpr& v,
                       const std::vector<LinExpr>& w);
  /// Symmetric matrix of expressions must be PSD. Upper triangle is read.
  void add_psd(const std::vector<std::vector<LinExpr>>& M);

  int num_vars() const { return num_vars_; }
  const Eigen::VectorXd& objective() const { return objective_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  double objective_constant() const { return objective_constant_; }

  /// Plain-text interchange dump (versioned header, 17 significant digits).
  void dump(std::ostream& os) const;

 private:
  Eigen::VectorXd row_of(const LinExpr& expr, double* constant) const;
  void push_block(ConeType cone, int dim, const std::vector<LinExpr>& rows);

  int num_vars_ = 0;
  Eigen::VectorXd objective_;
  double objective_constant_ = 0.0;
  std::vector<Block> blocks_;
  std::map<std::string, std::pair<int, int>> slices_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

std::string status_name(SolveStatus s);

struct SolverOptions {
  double feas_tol = 1e-7;
  double gap_tol = 1e-7;
  int max_iter = 200;
  double mem_budget_mb = 1024.0;
};

struct ConicSolution {
  Eigen::VectorXd primal;
  std::vector<Eigen::VectorXd> duals;  // one multiplier vector per block
  SolveStatus status = SolveStatus::MaxIter;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;

  Eigen::VectorXd slice(const ConicProgram& prog, const std::string& name) const;
};

/// Primal-dual interior-point solve with Nesterov-Todd scaling and Mehrotra
/// predictor-corrector steps. Deterministic given identical inputs.
ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts = {});

}  // namespace smkl
