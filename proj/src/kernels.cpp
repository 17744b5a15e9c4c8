#include "smkl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace smkl {

namespace {

// Guard against overflow in exp/tanh for pathological inputs;
// standardized features keep arguments far inside this range.
constexpr double kArgClamp = 700.0;

double clamp_arg(double v) { return std::clamp(v, -kArgClamp, kArgClamp); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError(msg);
}

}  // namespace

std::string family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Linear: return "linear";
    case KernelFamily::Polynomial: return "polynomial";
    case KernelFamily::RBF: return "rbf";
    case KernelFamily::Sigmoid: return "sigmoid";
    case KernelFamily::Laplacian: return "laplacian";
  }
  throw InputError("unknown kernel family");
}

KernelFamily family_from_name(const std::string& name) {
  if (name == "linear") return KernelFamily::Linear;
  if (name == "polynomial" || name == "poly") return KernelFamily::Polynomial;
  if (name == "rbf" || name == "gaussian") return KernelFamily::RBF;
  if (name == "sigmoid") return KernelFamily::Sigmoid;
  if (name == "laplacian") return KernelFamily::Laplacian;
  throw InputError("unknown kernel family: " + name);
}

KernelSpec KernelSpec::linear() { return KernelSpec{}; }

KernelSpec KernelSpec::polynomial(int degree, double scale, double offset) {
  KernelSpec s;
  s.family = KernelFamily::Polynomial;
  s.degree = degree;
  s.scale = scale;
  s.offset = offset;
  s.has_degree = s.has_scale = s.has_offset = true;
  return s;
}

KernelSpec KernelSpec::rbf(double gamma) {
  KernelSpec s;
  s.family = KernelFamily::RBF;
  s.gamma = gamma;
  s.has_gamma = true;
  return s;
}

KernelSpec KernelSpec::sigmoid(double gamma, double offset) {
  KernelSpec s;
  s.family = KernelFamily::Sigmoid;
  s.gamma = gamma;
  s.offset = offset;
  s.has_gamma = s.has_offset = true;
  return s;
}

KernelSpec KernelSpec::laplacian(double gamma) {
  KernelSpec s;
  s.family = KernelFamily::Laplacian;
  s.gamma = gamma;
  s.has_gamma = true;
  return s;
}

void KernelSpec::validate() const {
  switch (family) {
    case KernelFamily::Linear:
      require(!has_degree && !has_scale && !has_offset && !has_gamma,
              "linear kernel takes no parameters");
      break;
    case KernelFamily::Polynomial:
      require(has_degree && has_scale && has_offset && !has_gamma,
              "polynomial kernel requires degree, scale, offset only");
      require(degree >= 1, "polynomial degree must be >= 1");
      require(scale > 0.0, "polynomial scale must be positive");
      break;
    case KernelFamily::RBF:
      require(has_gamma && !has_degree && !has_scale && !has_offset,
              "rbf kernel requires gamma only");
      require(gamma > 0.0, "rbf gamma must be positive");
      break;
    case KernelFamily::Sigmoid:
      require(has_gamma && has_offset && !has_degree && !has_scale,
              "sigmoid kernel requires gamma and offset only");
      require(gamma > 0.0, "sigmoid gamma must be positive");
      break;
    case KernelFamily::Laplacian:
      require(has_gamma && !has_degree && !has_scale && !has_offset,
              "laplacian kernel requires gamma only");
      require(gamma > 0.0, "laplacian gamma must be positive");
      break;
  }
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  os << family_name(family);
  if (has_degree) os << " d=" << degree;
  if (has_scale) os << " alpha=" << scale;
  if (has_offset) os << " c0=" << offset;
  if (has_gamma) os << " gamma=" << gamma;
  return os.str();
}

double GramMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void KernelBank::validate() const {
  if (kernels.empty()) throw InputError("kernel bank must have q >= 1 members");
  const Eigen::Index dim = kernels.front().size();
  for (const auto& k : kernels) {
    if (k.size() != dim) throw InputError("kernel bank members differ in size");
  }
}

Eigen::MatrixXd compute_kernel_block(const KernelSpec& spec,
                                     const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& B) {
  spec.validate();
  if (!A.allFinite() || !B.allFinite())
    throw InputError("feature matrix contains non-finite values");
  if (A.cols() != B.cols())
    throw InputError("feature matrices have mismatched dimension");

  const Eigen::Index na = A.rows(), nb = B.rows();
  Eigen::MatrixXd K(na, nb);
  switch (spec.family) {
    case KernelFamily::Linear:
      K = A * B.transpose();
      break;
    case KernelFamily::Polynomial: {
      Eigen::MatrixXd inner = A * B.transpose();
      K = (spec.scale * inner.array() + spec.offset)
              .pow(static_cast<double>(spec.degree));
      break;
    }
    case KernelFamily::RBF: {
      Eigen::VectorXd a2 = A.rowwise().squaredNorm();
      Eigen::VectorXd b2 = B.rowwise().squaredNorm();
      Eigen::MatrixXd d2 = a2.replicate(1, nb) + b2.transpose().replicate(na, 1) -
                           2.0 * A * B.transpose();
      K = (-spec.gamma * d2.array().max(0.0))
              .unaryExpr([](double v) { return std::exp(clamp_arg(v)); });
      break;
    }
    case KernelFamily::Sigmoid: {
      Eigen::MatrixXd inner = A * B.transpose();
      K = (spec.gamma * inner.array() + spec.offset)
              .unaryExpr([](double v) { return std::tanh(clamp_arg(v)); });
      break;
    }
    case KernelFamily::Laplacian: {
      for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j) {
          double d1 = (A.row(i) - B.row(j)).cwiseAbs().sum();
          K(i, j) = std::exp(clamp_arg(-spec.gamma * d1));
        }
      break;
    }
  }
  return K;
}

GramMatrix compute_gram(const KernelSpec& spec, const Eigen::MatrixXd& X,
                        double jitter) {
  GramMatrix g;
  g.jitter = jitter;
  g.source = spec.describe();
  Eigen::MatrixXd K = compute_kernel_block(spec, X, X);
  K = ((K + K.transpose()) / 2.0).eval();
  K.diagonal().array() += jitter;
  g.entries = K;

  // Sigmoid kernels are not PSD in general; shift the diagonal when the
  // jitter was not enough and record the adjustment.
  double lam_min = g.min_eigenvalue();
  if (lam_min < -1e-8) {
    g.indefinite_shift = std::abs(lam_min) + 1e-6;
    g.entries.diagonal().array() += g.indefinite_shift;
  }
  return g;
}

GramMatrix combine(const KernelBank& bank, const Eigen::VectorXd& beta) {
  bank.validate();
  if (beta.size() != bank.q())
    throw InputError("beta dimension does not match bank size");
  GramMatrix g;
  g.source = "combined";
  g.jitter = 0.0;
  g.entries = Eigen::MatrixXd::Zero(bank.n(), bank.n());
  for (int i = 0; i < bank.q(); ++i) g.entries += beta[i] * bank[i];
  g.entries = ((g.entries + g.entries.transpose()) / 2.0).eval();
  return g;
}

Eigen::MatrixXd combine_cross(const std::vector<KernelSpec>& specs,
                              const Eigen::VectorXd& beta,
                              const Eigen::MatrixXd& X_train,
                              const Eigen::MatrixXd& X_test) {
  if (static_cast<int>(specs.size()) != beta.size())
    throw InputError("beta dimension does not match spec list");
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(X_train.rows(), X_test.rows());
  for (size_t i = 0; i < specs.size(); ++i) {
    if (beta[static_cast<Eigen::Index>(i)] == 0.0) continue;
    K += beta[static_cast<Eigen::Index>(i)] *
         compute_kernel_block(specs[i], X_train, X_test);
  }
  return K;
}

KernelBank make_simdiag_bank(const Eigen::MatrixXd& U,
                             const std::vector<Eigen::VectorXd>& diagonals) {
  const Eigen::Index n = U.rows();
  if (U.cols() != n) throw InputError("U must be square");
  double orth_err =
      (U.transpose() * U - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (orth_err > 1e-10)
    throw InputError("U is not orthogonal within 1e-10");
  if (diagonals.empty()) throw InputError("need at least one diagonal");
  KernelBank bank;
  for (size_t i = 0; i < diagonals.size(); ++i) {
    const auto& d = diagonals[i];
    if (d.size() != n) throw InputError("diagonal dimension mismatch");
    if (d.minCoeff() < 0.0) throw InputError("diagonals must be nonnegative");
    GramMatrix g;
    g.jitter = 0.0;
    g.source = "simdiag " + std::to_string(i);
    g.entries = U * d.asDiagonal() * U.transpose();
    g.entries = ((g.entries + g.entries.transpose()) / 2.0).eval();
    bank.kernels.push_back(std::move(g));
  }
  return bank;
}

std::vector<KernelSpec> parse_kernel_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("kernel config is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw InputError("kernel config must be a JSON list");
  std::vector<KernelSpec> specs;
  for (const auto& rec : j) {
    if (!rec.contains("family"))
      throw InputError("kernel record missing 'family'");
    KernelSpec s;
    s.family = family_from_name(rec.at("family").get<std::string>());
    if (rec.contains("degree")) { s.degree = rec.at("degree").get<int>(); s.has_degree = true; }
    if (rec.contains("scale")) { s.scale = rec.at("scale").get<double>(); s.has_scale = true; }
    if (rec.contains("offset")) { s.offset = rec.at("offset").get<double>(); s.has_offset = true; }
    if (rec.contains("gamma")) { s.gamma = rec.at("gamma").get<double>(); s.has_gamma = true; }
    s.validate();
    specs.push_back(s);
  }
  if (specs.empty()) throw InputError("kernel config has no records");
  return specs;
}

std::vector<KernelSpec> load_kernel_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open kernel config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kernel_config(ss.str());
}

std::vector<KernelSpec> default_kernel_specs() {
  std::vector<KernelSpec> specs;
  specs.push_back(KernelSpec::linear());
  for (int d : {2, 3, 5}) specs.push_back(KernelSpec::polynomial(d, 0.01, 1.0));
  for (double g : {0.5, 0.3, 0.1}) specs.push_back(KernelSpec::rbf(g));
  for (double g : {0.5, 0.7}) specs.push_back(KernelSpec::sigmoid(g, 1.0));
  specs.push_back(KernelSpec::laplacian(0.3));
  return specs;
}

KernelBank build_bank(const std::vector<KernelSpec>& specs,
                      const Eigen::MatrixXd& X, double jitter) {
  KernelBank bank;
  bank.kernels.reserve(specs.size());
  for (const auto& s : specs) bank.kernels.push_back(compute_gram(s, X, jitter));
  bank.validate();
  return bank;
}

}  // namespace smkl
