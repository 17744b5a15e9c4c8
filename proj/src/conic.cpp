#include "smkl/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>

namespace smkl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

std::string cone_name(ConeType t) {
  switch (t) {
    case ConeType::Zero: return "zero";
    case ConeType::Nonneg: return "nonneg";
    case ConeType::Soc: return "soc";
    case ConeType::RotatedSoc: return "rsoc";
    case ConeType::Psd: return "psd";
  }
  return "?";
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "?";
}

LinExpr LinExpr::var(int index, double coef) {
  LinExpr e;
  e.terms.emplace_back(index, coef);
  return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  constant += other.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const auto& [i, c] : other.terms) terms.emplace_back(i, -c);
  constant -= other.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double scale) {
  for (auto& [i, c] : terms) c *= scale;
  constant *= scale;
  return *this;
}

int ConicProgram::add_variables(const std::string& name, int count) {
  if (count < 1) throw InputError("add_variables: count must be >= 1");
  int start = num_vars_;
  num_vars_ += count;
  objective_.conservativeResize(num_vars_);
  objective_.tail(count).setZero();
  slices_[name] = {start, count};
  return start;
}

std::pair<int, int> ConicProgram::slice(const std::string& name) const {
  auto it = slices_.find(name);
  if (it == slices_.end()) throw InputError("unknown variable slice: " + name);
  return it->second;
}

Eigen::VectorXd ConicProgram::row_of(const LinExpr& expr, double* constant) const {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(num_vars_);
  for (const auto& [i, c] : expr.terms) {
    if (i < 0 || i >= num_vars_)
      throw InputError("expression references unknown variable");
    row[i] += c;
  }
  *constant = expr.constant;
  return row;
}

void ConicProgram::set_objective(const LinExpr& expr) {
  double c0 = 0.0;
  objective_ = row_of(expr, &c0);
  objective_constant_ = c0;
}

void ConicProgram::add_objective_term(const LinExpr& expr) {
  double c0 = 0.0;
  objective_ += row_of(expr, &c0);
  objective_constant_ += c0;
}

void ConicProgram::push_block(ConeType cone, int dim,
                              const std::vector<LinExpr>& rows) {
  Block blk;
  blk.cone = cone;
  blk.dim = dim;
  blk.A.resize(static_cast<Eigen::Index>(rows.size()), num_vars_);
  blk.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    double c0 = 0.0;
    blk.A.row(static_cast<Eigen::Index>(r)) = row_of(rows[r], &c0).transpose();
    blk.b[static_cast<Eigen::Index>(r)] = c0;
  }
  blocks_.push_back(std::move(blk));
}

void ConicProgram::add_zero(const LinExpr& expr) {
  push_block(ConeType::Zero, 1, {expr});
}

void ConicProgram::add_nonneg(const LinExpr& expr) {
  push_block(ConeType::Nonneg, 1, {expr});
}

void ConicProgram::add_soc(const std::vector<LinExpr>& rows) {
  if (rows.size() < 2) throw InputError("soc block needs dimension >= 2");
  push_block(ConeType::Soc, static_cast<int>(rows.size()), rows);
}

void ConicProgram::add_rotated_soc(const LinExpr& u, const LinExpr& v,
                                   const std::vector<LinExpr>& w) {
  if (w.empty()) throw InputError("rotated soc block needs a nonempty w");
  std::vector<LinExpr> rows;
  rows.push_back(u);
  rows.push_back(v);
  rows.insert(rows.end(), w.begin(), w.end());
  push_block(ConeType::RotatedSoc, static_cast<int>(rows.size()), rows);
}

void ConicProgram::add_psd(const std::vector<std::vector<LinExpr>>& M) {
  const int m = static_cast<int>(M.size());
  if (m < 1) throw InputError("psd block needs side >= 1");
  for (const auto& row : M)
    if (static_cast<int>(row.size()) != m)
      throw InputError("psd block matrix must be square");
  // svec rows: columns j, rows i >= j, off-diagonals scaled by sqrt(2).
  std::vector<LinExpr> rows;
  rows.reserve(static_cast<size_t>(m) * (m + 1) / 2);
  for (int j = 0; j < m; ++j)
    for (int i = j; i < m; ++i) {
      LinExpr e = M[j][i];
      if (i != j) e *= kSqrt2;
      rows.push_back(std::move(e));
    }
  push_block(ConeType::Psd, m, rows);
}

void ConicProgram::dump(std::ostream& os) const {
  os << "SMKL-CONIC 1\n";
  os << "vars " << num_vars_ << "\n";
  os << std::setprecision(17);
  os << "objective";
  for (Eigen::Index i = 0; i < objective_.size(); ++i) os << " " << objective_[i];
  os << "\n";
  os << "objective_constant " << objective_constant_ << "\n";
  os << "blocks " << blocks_.size() << "\n";
  for (const auto& blk : blocks_) {
    os << "block " << cone_name(blk.cone) << " " << blk.dim << " rows "
       << blk.A.rows() << "\n";
    for (Eigen::Index r = 0; r < blk.A.rows(); ++r) {
      for (Eigen::Index c = 0; c < blk.A.cols(); ++c) os << blk.A(r, c) << " ";
      os << "| " << blk.b[r] << "\n";
    }
  }
}

Eigen::VectorXd ConicSolution::slice(const ConicProgram& prog,
                                     const std::string& name) const {
  auto [start, count] = prog.slice(name);
  return primal.segment(start, count);
}

// ---------------------------------------------------------------------------
// Interior-point solver internals.
// ---------------------------------------------------------------------------

namespace {

int svec_len(int m) { return m * (m + 1) / 2; }

Eigen::MatrixXd svec_to_mat(const Eigen::Ref<const Eigen::VectorXd>& v, int m) {
  Eigen::MatrixXd X(m, m);
  int k = 0;
  for (int j = 0; j < m; ++j)
    for (int i = j; i < m; ++i, ++k) {
      double val = (i == j) ? v[k] : v[k] / kSqrt2;
      X(i, j) = val;
      X(j, i) = val;
    }
  return X;
}

Eigen::VectorXd mat_to_svec(const Eigen::MatrixXd& X) {
  const int m = static_cast<int>(X.rows());
  Eigen::VectorXd v(svec_len(m));
  int k = 0;
  for (int j = 0; j < m; ++j)
    for (int i = j; i < m; ++i, ++k)
      v[k] = (i == j) ? X(i, j) : kSqrt2 * 0.5 * (X(i, j) + X(j, i));
  return v;
}

// One scaled cone block of the composite slack vector.
struct ConeBlock {
  ConeType type;  // Nonneg, Soc or Psd after lowering
  int dim;        // vector length (Psd: matrix side)
  int offset;     // start within the composite cone vector
  int len;        // vector length within the composite cone vector

  // Scaling state.
  Eigen::VectorXd w;          // Nonneg
  Eigen::VectorXd wbar;       // Soc: unit hyperbolic scaling point
  double eta = 1.0;           // Soc
  Eigen::MatrixXd R, Rinv;    // Psd
  Eigen::VectorXd lam;        // scaled point, block-local

  int degree() const {
    switch (type) {
      case ConeType::Nonneg: return len;
      case ConeType::Soc: return 1;
      case ConeType::Psd: return dim;
      default: return 0;
    }
  }

  void identity(Eigen::Ref<Eigen::VectorXd> out) const {
    out.setZero();
    switch (type) {
      case ConeType::Nonneg: out.setOnes(); break;
      case ConeType::Soc: out[0] = 1.0; break;
      case ConeType::Psd: {
        int k = 0;
        for (int j = 0; j < dim; ++j)
          for (int i = j; i < dim; ++i, ++k)
            if (i == j) out[k] = 1.0;
        break;
      }
      default: break;
    }
  }

  // Smallest cone-eigenvalue of a block-local vector.
  double min_eig(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    switch (type) {
      case ConeType::Nonneg:
        return v.minCoeff();
      case ConeType::Soc:
        return v[0] - v.tail(len - 1).norm();
      case ConeType::Psd: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            svec_to_mat(v, dim), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
      }
      default:
        return 0.0;
    }
  }

  void compute_scaling(const Eigen::Ref<const Eigen::VectorXd>& s,
                       const Eigen::Ref<const Eigen::VectorXd>& z) {
    switch (type) {
      case ConeType::Nonneg:
        w = (s.array() / z.array()).sqrt();
        lam = (s.array() * z.array()).sqrt();
        break;
      case ConeType::Soc: {
        const int k = len;
        double snorm = std::sqrt(std::max(
            s[0] * s[0] - s.tail(k - 1).squaredNorm(), 1e-300));
        double znorm = std::sqrt(std::max(
            z[0] * z[0] - z.tail(k - 1).squaredNorm(), 1e-300));
        Eigen::VectorXd sb = s / snorm, zb = z / znorm;
        double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
        wbar.resize(k);
        wbar[0] = (sb[0] + zb[0]) / (2.0 * gamma);
        wbar.tail(k - 1) =
            (sb.tail(k - 1) - zb.tail(k - 1)) / (2.0 * gamma);
        eta = std::sqrt(snorm / znorm);
        lam = apply_W(z);
        break;
      }
      case ConeType::Psd: {
        Eigen::MatrixXd S = svec_to_mat(s, dim), Z = svec_to_mat(z, dim);
        Eigen::LLT<Eigen::MatrixXd> ls(S), lz(Z);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
          throw NumericalError("interior point left the PSD cone");
        Eigen::MatrixXd Ls = ls.matrixL();
        Eigen::MatrixXd Lz = lz.matrixL();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::VectorXd sig = svd.singularValues();
        Eigen::VectorXd sig_isqrt = sig.array().rsqrt();
        R = Ls * svd.matrixV() * sig_isqrt.asDiagonal();
        Rinv = sig_isqrt.asDiagonal() * svd.matrixU().transpose() *
               Lz.transpose();
        // Scaled point is exactly diagonal.
        Eigen::MatrixXd Lam = sig.asDiagonal();
        lam = mat_to_svec(Lam);
        break;
      }
      default:
        break;
    }
  }

  // W v = svec(R' V R) for Psd; symmetric matrices for Nonneg/Soc.
  Eigen::VectorXd apply_W(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    switch (type) {
      case ConeType::Nonneg:
        return (w.array() * v.array()).matrix();
      case ConeType::Soc: {
        const int k = len;
        Eigen::VectorXd out(k);
        double dot = wbar.tail(k - 1).dot(v.tail(k - 1));
        out[0] = wbar[0] * v[0] + dot;
        out.tail(k - 1) = v.tail(k - 1) +
                          (v[0] + dot / (1.0 + wbar[0])) * wbar.tail(k - 1);
        return eta * out;
      }
      case ConeType::Psd:
        return mat_to_svec(R.transpose() * svec_to_mat(v, dim) * R);
      default:
        return v;
    }
  }

  Eigen::VectorXd apply_WT(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    if (type == ConeType::Psd)
      return mat_to_svec(R * svec_to_mat(v, dim) * R.transpose());
    return apply_W(v);
  }

  Eigen::VectorXd apply_Winv(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    switch (type) {
      case ConeType::Nonneg:
        return (v.array() / w.array()).matrix();
      case ConeType::Soc: {
        const int k = len;
        Eigen::VectorXd out(k);
        double dot = wbar.tail(k - 1).dot(v.tail(k - 1));
        out[0] = wbar[0] * v[0] - dot;
        out.tail(k - 1) = v.tail(k - 1) +
                          (-v[0] + dot / (1.0 + wbar[0])) * wbar.tail(k - 1);
        return out / eta;
      }
      case ConeType::Psd:
        return mat_to_svec(Rinv.transpose() * svec_to_mat(v, dim) * Rinv);
      default:
        return v;
    }
  }

  Eigen::VectorXd apply_WinvT(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    if (type == ConeType::Psd)
      return mat_to_svec(Rinv * svec_to_mat(v, dim) * Rinv.transpose());
    return apply_Winv(v);
  }

  // Jordan product u o v.
  Eigen::VectorXd jordan_mul(const Eigen::Ref<const Eigen::VectorXd>& u,
                             const Eigen::Ref<const Eigen::VectorXd>& v) const {
    switch (type) {
      case ConeType::Nonneg:
        return (u.array() * v.array()).matrix();
      case ConeType::Soc: {
        Eigen::VectorXd out(len);
        out[0] = u.dot(v);
        out.tail(len - 1) = u[0] * v.tail(len - 1) + v[0] * u.tail(len - 1);
        return out;
      }
      case ConeType::Psd: {
        Eigen::MatrixXd U = svec_to_mat(u, dim), V = svec_to_mat(v, dim);
        return mat_to_svec(0.5 * (U * V + V * U));
      }
      default:
        return u;
    }
  }

  // Solve lam o x = d for x, using the stored scaled point.
  Eigen::VectorXd jordan_solve(const Eigen::Ref<const Eigen::VectorXd>& d) const {
    switch (type) {
      case ConeType::Nonneg:
        return (d.array() / lam.array()).matrix();
      case ConeType::Soc: {
        const int k = len;
        double l0 = lam[0];
        double det = l0 * l0 - lam.tail(k - 1).squaredNorm();
        Eigen::VectorXd out(k);
        out[0] = (l0 * d[0] - lam.tail(k - 1).dot(d.tail(k - 1))) / det;
        out.tail(k - 1) = (d.tail(k - 1) - out[0] * lam.tail(k - 1)) / l0;
        return out;
      }
      case ConeType::Psd: {
        // lam is diagonal by construction of the NT scaling.
        Eigen::VectorXd diag(dim);
        int k = 0;
        for (int j = 0; j < dim; ++j)
          for (int i = j; i < dim; ++i, ++k)
            if (i == j) diag[j] = lam[k];
        Eigen::MatrixXd D = svec_to_mat(d, dim);
        Eigen::MatrixXd X(dim, dim);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            X(i, j) = 2.0 * D(i, j) / (diag[i] + diag[j]);
        return mat_to_svec(X);
      }
      default:
        return d;
    }
  }

  // Largest step a with lam + a*dir staying in the cone (may be +inf).
  double max_step(const Eigen::Ref<const Eigen::VectorXd>& dir) const {
    switch (type) {
      case ConeType::Nonneg: {
        double best = kInf;
        for (int i = 0; i < len; ++i)
          if (dir[i] < 0.0) best = std::min(best, -lam[i] / dir[i]);
        return best;
      }
      case ConeType::Soc: {
        const int k = len;
        double a = dir[0] * dir[0] - dir.tail(k - 1).squaredNorm();
        double b = 2.0 * (lam[0] * dir[0] - lam.tail(k - 1).dot(dir.tail(k - 1)));
        double c = lam[0] * lam[0] - lam.tail(k - 1).squaredNorm();
        double best = kInf;
        if (std::abs(a) < 1e-300) {
          if (b < 0.0) best = -c / b;
        } else {
          double disc = b * b - 4.0 * a * c;
          if (disc >= 0.0) {
            double sq = std::sqrt(disc);
            for (double r : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
              if (r > 0.0) best = std::min(best, r);
          }
        }
        if (dir[0] < 0.0) best = std::min(best, -lam[0] / dir[0]);
        return best;
      }
      case ConeType::Psd: {
        Eigen::VectorXd diag(dim);
        int k = 0;
        for (int j = 0; j < dim; ++j)
          for (int i = j; i < dim; ++i, ++k)
            if (i == j) diag[j] = lam[k];
        Eigen::VectorXd d_isqrt = diag.array().rsqrt();
        Eigen::MatrixXd Dm = svec_to_mat(dir, dim);
        Eigen::MatrixXd M =
            d_isqrt.asDiagonal() * Dm * d_isqrt.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                          Eigen::EigenvaluesOnly);
        double emin = es.eigenvalues().minCoeff();
        return emin >= 0.0 ? kInf : 1.0 / (-emin);
      }
      default:
        return kInf;
    }
  }
};

struct StandardForm {
  Eigen::MatrixXd A;  // equality lhs (P x N)
  Eigen::VectorXd b;
  Eigen::MatrixXd G;  // cone lhs (L x N): G x + s_cone = h
  Eigen::VectorXd h;
  std::vector<ConeBlock> cones;
  // Mapping back to program blocks: for each program block, (is_zero, row
  // offset in A or index into cones).
  struct BlockRef {
    bool zero;
    int eq_offset = 0;
    int cone_index = 0;
    bool rotated = false;
  };
  std::vector<BlockRef> refs;
};

// Rotated cone (u, v, w) maps to SOC (u+v, u-v, sqrt2*w); the map T
// satisfies T'T = 2I on the first two coordinates and 2I on w, so duals map
// back through T'/... the transpose directly.
Eigen::MatrixXd rsoc_map(int dim) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
  T(0, 0) = 1.0; T(0, 1) = 1.0;
  T(1, 0) = 1.0; T(1, 1) = -1.0;
  for (int i = 2; i < dim; ++i) T(i, i) = kSqrt2;
  return T;
}

StandardForm lower(const ConicProgram& prog, const SolverOptions& opts) {
  const int N = prog.num_vars();
  if (N == 0) throw InputError("program has no variables");
  Eigen::Index eq_rows = 0, cone_rows = 0;
  for (const auto& blk : prog.blocks()) {
    if (blk.cone == ConeType::Zero)
      eq_rows += blk.A.rows();
    else
      cone_rows += blk.A.rows();
  }
  // Memory guard for the dense KKT workspace.
  double doubles = double(cone_rows) * N * 2 + double(N + eq_rows) * (N + eq_rows) +
                   double(cone_rows) * cone_rows * 0;  // scalings are block-local
  for (const auto& blk : prog.blocks())
    if (blk.cone == ConeType::Psd)
      doubles += 6.0 * double(blk.dim) * blk.dim;
  double mb = doubles * 8.0 / (1024.0 * 1024.0);
  if (mb > opts.mem_budget_mb)
    throw CapacityError("conic program exceeds memory budget (" +
                        std::to_string(mb) + " MB estimated, budget " +
                        std::to_string(opts.mem_budget_mb) + " MB)");

  StandardForm sf;
  sf.A.setZero(eq_rows, N);
  sf.b.resize(eq_rows);
  sf.G.setZero(cone_rows, N);
  sf.h.resize(cone_rows);
  Eigen::Index eq_at = 0, cone_at = 0;
  for (const auto& blk : prog.blocks()) {
    StandardForm::BlockRef ref;
    if (blk.cone == ConeType::Zero) {
      ref.zero = true;
      ref.eq_offset = static_cast<int>(eq_at);
      // Blocks recorded before later add_variables calls carry fewer columns;
      // the missing trailing coefficients are zero.
      sf.A.middleRows(eq_at, blk.A.rows()).leftCols(blk.A.cols()) = blk.A;
      sf.b.segment(eq_at, blk.A.rows()) = -blk.b;
      eq_at += blk.A.rows();
    } else {
      ref.zero = false;
      ref.cone_index = static_cast<int>(sf.cones.size());
      Eigen::MatrixXd Ab = blk.A;
      Eigen::VectorXd bb = blk.b;
      ConeBlock cb;
      cb.dim = blk.dim;
      cb.len = static_cast<int>(blk.A.rows());
      cb.offset = static_cast<int>(cone_at);
      if (blk.cone == ConeType::RotatedSoc) {
        Eigen::MatrixXd T = rsoc_map(static_cast<int>(blk.A.rows()));
        Ab = T * Ab;
        bb = T * bb;
        cb.type = ConeType::Soc;
        ref.rotated = true;
      } else if (blk.cone == ConeType::Nonneg || blk.cone == ConeType::Soc ||
                 blk.cone == ConeType::Psd) {
        cb.type = blk.cone;
      }
      // A x + b in K  ->  (-A) x + s = b, s in K.
      sf.G.middleRows(cone_at, Ab.rows()).leftCols(Ab.cols()) = -Ab;
      sf.h.segment(cone_at, Ab.rows()) = bb;
      sf.cones.push_back(cb);
      cone_at += Ab.rows();
    }
    sf.refs.push_back(ref);
  }
  return sf;
}

class Ipm {
 public:
  Ipm(const ConicProgram& prog, const SolverOptions& opts)
      : prog_(prog), opts_(opts), sf_(lower(prog, opts)) {
    N_ = prog.num_vars();
    P_ = static_cast<int>(sf_.A.rows());
    L_ = static_cast<int>(sf_.G.rows());
    if (L_ == 0)
      throw InputError("program has no cone constraints");
    nu_ = 0;
    for (const auto& cb : sf_.cones) nu_ += cb.degree();
  }

  ConicSolution run();

 private:
  // Composite cone-vector helpers dispatching per block.
  template <typename F>
  Eigen::VectorXd per_block(F&& f, const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(L_);
    for (const auto& cb : sf_.cones)
      out.segment(cb.offset, cb.len) = f(cb, v.segment(cb.offset, cb.len));
    return out;
  }
  Eigen::VectorXd W(const Eigen::VectorXd& v) const {
    return per_block([](const ConeBlock& c, auto s) { return c.apply_W(s); }, v);
  }
  Eigen::VectorXd WT(const Eigen::VectorXd& v) const {
    return per_block([](const ConeBlock& c, auto s) { return c.apply_WT(s); }, v);
  }
  Eigen::VectorXd Winv(const Eigen::VectorXd& v) const {
    return per_block([](const ConeBlock& c, auto s) { return c.apply_Winv(s); }, v);
  }
  Eigen::VectorXd WinvT(const Eigen::VectorXd& v) const {
    return per_block([](const ConeBlock& c, auto s) { return c.apply_WinvT(s); },
                     v);
  }
  Eigen::VectorXd jmul(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(L_);
    for (const auto& cb : sf_.cones)
      out.segment(cb.offset, cb.len) = cb.jordan_mul(
          u.segment(cb.offset, cb.len), v.segment(cb.offset, cb.len));
    return out;
  }
  Eigen::VectorXd jsolve(const Eigen::VectorXd& d) const {
    Eigen::VectorXd out(L_);
    for (const auto& cb : sf_.cones)
      out.segment(cb.offset, cb.len) = cb.jordan_solve(d.segment(cb.offset, cb.len));
    return out;
  }
  Eigen::VectorXd cone_identity() const {
    Eigen::VectorXd e(L_);
    for (const auto& cb : sf_.cones) cb.identity(e.segment(cb.offset, cb.len));
    return e;
  }
  double min_cone_eig(const Eigen::VectorXd& v) const {
    double m = kInf;
    for (const auto& cb : sf_.cones)
      m = std::min(m, cb.min_eig(v.segment(cb.offset, cb.len)));
    return m;
  }
  double max_step(const Eigen::VectorXd& dir) const {
    double a = kInf;
    for (const auto& cb : sf_.cones)
      a = std::min(a, cb.max_step(dir.segment(cb.offset, cb.len)));
    return a;
  }

  // Solve the reduced KKT system for the current scaling.
  //   [Gs'Gs  A'] [dx]   [rhs_x]
  //   [A      0 ] [dy] = [rhs_y]
  void factor_kkt(const Eigen::MatrixXd& Gs) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N_ + P_, N_ + P_);
    M.topLeftCorner(N_, N_) = Gs.transpose() * Gs;
    M.topLeftCorner(N_, N_).diagonal().array() += 1e-12;
    if (P_ > 0) {
      M.topRightCorner(N_, P_) = sf_.A.transpose();
      M.bottomLeftCorner(P_, N_) = sf_.A;
      M.bottomRightCorner(P_, P_).diagonal().array() -= 1e-12;
    }
    kkt_.compute(M);
  }
  void solve_kkt(const Eigen::VectorXd& rhs_x, const Eigen::VectorXd& rhs_y,
                 Eigen::VectorXd* dx, Eigen::VectorXd* dy) const {
    Eigen::VectorXd rhs(N_ + P_);
    rhs.head(N_) = rhs_x;
    if (P_ > 0) rhs.tail(P_) = rhs_y;
    Eigen::VectorXd sol = kkt_.solve(rhs);
    *dx = sol.head(N_);
    *dy = P_ > 0 ? sol.tail(P_) : Eigen::VectorXd(0);
  }

  ConicSolution package(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& z, SolveStatus status,
                        int iters) const;

  const ConicProgram& prog_;
  SolverOptions opts_;
  StandardForm sf_;
  int N_, P_, L_, nu_;
  Eigen::PartialPivLU<Eigen::MatrixXd> kkt_;
};

ConicSolution Ipm::package(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& z, SolveStatus status,
                           int iters) const {
  ConicSolution sol;
  sol.status = status;
  sol.iterations = iters;
  sol.primal = x;
  sol.primal_obj = prog_.objective().dot(x) + prog_.objective_constant();
  sol.dual_obj = -sf_.b.dot(y) - sf_.h.dot(z) + prog_.objective_constant();
  sol.duals.reserve(prog_.blocks().size());
  for (size_t bi = 0; bi < prog_.blocks().size(); ++bi) {
    const auto& ref = sf_.refs[bi];
    const auto& blk = prog_.blocks()[bi];
    if (ref.zero) {
      sol.duals.push_back(y.segment(ref.eq_offset, blk.A.rows()));
    } else {
      const auto& cb = sf_.cones[ref.cone_index];
      Eigen::VectorXd zi = z.segment(cb.offset, cb.len);
      if (ref.rotated) zi = rsoc_map(cb.len).transpose() * zi;
      sol.duals.push_back(zi);
    }
  }
  return sol;
}

ConicSolution Ipm::run() {
  const Eigen::VectorXd& c = prog_.objective();
  // Initial scaling is the identity; shared KKT path gives least-squares
  // style starting points a la conelp.
  for (auto& cb : sf_.cones) {
    Eigen::VectorXd e(cb.len);
    cb.identity(e);
    cb.w = Eigen::VectorXd::Ones(cb.len);
    cb.wbar = e;
    cb.eta = 1.0;
    if (cb.type == ConeType::Psd) {
      cb.R = Eigen::MatrixXd::Identity(cb.dim, cb.dim);
      cb.Rinv = cb.R;
    }
    cb.lam = e;
  }
  factor_kkt(sf_.G);

  Eigen::VectorXd x, y, dx, dy;
  solve_kkt(sf_.G.transpose() * sf_.h, sf_.b, &x, &y);
  Eigen::VectorXd s = sf_.h - sf_.G * x;
  double ts = -min_cone_eig(s);
  Eigen::VectorXd e = cone_identity();
  if (ts >= -1e-8) s += (1.0 + ts) * e;

  solve_kkt(-c, Eigen::VectorXd::Zero(P_), &dx, &y);
  y = P_ > 0 ? -y : Eigen::VectorXd(0);
  Eigen::VectorXd z = -(sf_.G * dx);
  // dx here solves G'G dx + A'(−y) = −c; z = −G dx satisfies A'y+G'z=−c... up
  // to least squares; shift into the cone.
  double tz = -min_cone_eig(z);
  if (tz >= -1e-8) z += (1.0 + tz) * e;

  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, sf_.b.norm());
  const double resz0 = std::max(1.0, sf_.h.norm());

  SolveStatus status = SolveStatus::MaxIter;
  int iter = 0;
  for (; iter < opts_.max_iter; ++iter) {
    Eigen::VectorXd rx = sf_.A.transpose() * y + sf_.G.transpose() * z + c;
    Eigen::VectorXd ry = sf_.A * x - sf_.b;
    Eigen::VectorXd rz = sf_.G * x + s - sf_.h;

    double pcost = c.dot(x);
    double dcost = -sf_.b.dot(y) - sf_.h.dot(z);
    double gap = s.dot(z);
    double pres = std::max(ry.norm() / resy0, rz.norm() / resz0);
    double dres = rx.norm() / resx0;
    double relgap = std::abs(pcost - dcost) / std::max(1.0, std::abs(pcost));

    if (pres <= opts_.feas_tol && dres <= opts_.feas_tol &&
        (relgap <= opts_.gap_tol || gap <= opts_.gap_tol)) {
      status = SolveStatus::Optimal;
      break;
    }
    // Crude certificate heuristics; the programs this solver sees are
    // feasible and bounded by construction.
    if (dcost > 1e10 * std::max(1.0, std::abs(pcost)) && pres > 1.0) {
      status = SolveStatus::Infeasible;
      break;
    }
    if (pcost < -1e10 * std::max(1.0, std::abs(dcost)) && dres > 1.0) {
      status = SolveStatus::Unbounded;
      break;
    }

    for (auto& cb : sf_.cones)
      cb.compute_scaling(s.segment(cb.offset, cb.len),
                         z.segment(cb.offset, cb.len));
    Eigen::VectorXd lam(L_);
    for (const auto& cb : sf_.cones) lam.segment(cb.offset, cb.len) = cb.lam;
    double mu = lam.squaredNorm() / nu_;

    Eigen::MatrixXd Gs(L_, N_);
    for (int col = 0; col < N_; ++col) Gs.col(col) = WinvT(sf_.G.col(col));
    factor_kkt(Gs);

    auto direction = [&](const Eigen::VectorXd& d, double eta_res,
                         Eigen::VectorXd* ddx, Eigen::VectorXd* ddy,
                         Eigen::VectorXd* ddz, Eigen::VectorXd* dds) {
      Eigen::VectorXd lam_inv_d = jsolve(d);
      Eigen::VectorXd rzt = WinvT(eta_res * rz);
      Eigen::VectorXd rhs_x = -eta_res * rx - Gs.transpose() * (rzt - lam_inv_d);
      solve_kkt(rhs_x, -eta_res * ry, ddx, ddy);
      Eigen::VectorXd tmp = Gs * (*ddx) + rzt - lam_inv_d;
      *ddz = Winv(tmp);
      *dds = -eta_res * rz - sf_.G * (*ddx);
    };

    // Predictor.
    Eigen::VectorXd d_aff = jmul(lam, lam);
    Eigen::VectorXd dx_a, dy_a, dz_a, ds_a;
    direction(d_aff, 1.0, &dx_a, &dy_a, &dz_a, &ds_a);
    Eigen::VectorXd dst_a = WinvT(ds_a);
    Eigen::VectorXd dzt_a = W(dz_a);
    double alpha_aff =
        std::min({max_step(dst_a), max_step(dzt_a), 1.0});
    double mu_aff = (lam + alpha_aff * dst_a).dot(lam + alpha_aff * dzt_a) / nu_;
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

    // Corrector.
    Eigen::VectorXd d_cor =
        d_aff + jmul(dst_a, dzt_a) - sigma * mu * cone_identity();
    Eigen::VectorXd dxv, dyv, dzv, dsv;
    direction(d_cor, 1.0 - sigma, &dxv, &dyv, &dzv, &dsv);
    Eigen::VectorXd dst = WinvT(dsv);
    Eigen::VectorXd dzt = W(dzv);
    double alpha = std::min({max_step(dst), max_step(dzt)});
    alpha = std::min(1.0, 0.99 * alpha);
    if (!std::isfinite(alpha) || alpha <= 0.0) break;

    x += alpha * dxv;
    if (P_ > 0) y += alpha * dyv;
    z += alpha * dzv;
    s += alpha * dsv;

    if (!x.allFinite() || !s.allFinite() || !z.allFinite()) break;
  }

  ConicSolution sol = package(x, y, z, status, iter);
  Eigen::VectorXd rx = sf_.A.transpose() * y + sf_.G.transpose() * z + c;
  Eigen::VectorXd ry = sf_.A * x - sf_.b;
  Eigen::VectorXd rz = sf_.G * x + s - sf_.h;
  sol.primal_residual = std::max(ry.norm() / resy0, rz.norm() / resz0);
  sol.dual_residual = rx.norm() / resx0;
  sol.gap = s.dot(z);
  return sol;
}

}  // namespace

ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts) {
  Ipm ipm(prog, opts);
  return ipm.run();
}

}  // namespace smkl
