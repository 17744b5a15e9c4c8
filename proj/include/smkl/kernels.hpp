#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "smkl/errors.hpp"

namespace smkl {

enum class KernelFamily { Linear, Polynomial, RBF, Sigmoid, Laplacian };

std::string family_name(KernelFamily family);
KernelFamily family_from_name(const std::string& name);

/// One kernel family plus its parameters. Parameters not used by the family
/// must stay at their defaults; validate() rejects anything else.
struct KernelSpec {
  KernelFamily family = KernelFamily::Linear;
  int degree = 0;       // Polynomial
  double scale = 0.0;   // Polynomial (alpha)
  double offset = 0.0;  // Polynomial (c0), Sigmoid (r)
  double gamma = 0.0;   // RBF, Sigmoid, Laplacian

  bool has_degree = false;
  bool has_scale = false;
  bool has_offset = false;
  bool has_gamma = false;

  static KernelSpec linear();
  static KernelSpec polynomial(int degree, double scale, double offset);
  static KernelSpec rbf(double gamma);
  static KernelSpec sigmoid(double gamma, double offset);
  static KernelSpec laplacian(double gamma);

  void validate() const;
  std::string describe() const;
};

/// Symmetrized, jittered Gram matrix over n points.
struct GramMatrix {
  Eigen::MatrixXd entries;
  double jitter = 1e-6;
  std::string source;
  // Extra diagonal shift applied when the jittered matrix was still
  // indefinite (sigmoid kernels); zero otherwise.
  double indefinite_shift = 0.0;

  Eigen::Index size() const { return entries.rows(); }
  double min_eigenvalue() const;
};

struct KernelBank {
  std::vector<GramMatrix> kernels;

  int q() const { return static_cast<int>(kernels.size()); }
  Eigen::Index n() const { return kernels.empty() ? 0 : kernels.front().size(); }
  const Eigen::MatrixXd& operator[](int i) const { return kernels.at(i).entries; }
  void validate() const;
};

constexpr double kDefaultJitter = 1e-6;

/// Raw kernel evaluation K(x_i, x_j) blocks between two point sets, no
/// symmetrization or jitter. Used for train/train and train/test blocks.
Eigen::MatrixXd compute_kernel_block(const KernelSpec& spec,
                                     const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& B);

/// Gram matrix per the family formula, then K <- (K + K^T)/2 + jitter*I,
/// with an extra diagonal shift if the result is still indefinite.
GramMatrix compute_gram(const KernelSpec& spec, const Eigen::MatrixXd& X,
                        double jitter = kDefaultJitter);

/// Entrywise convex combination sum_i beta_i K_i.
GramMatrix combine(const KernelBank& bank, const Eigen::VectorXd& beta);

/// Cross block sum_i beta_i K_i(train, test) for prediction.
Eigen::MatrixXd combine_cross(const std::vector<KernelSpec>& specs,
                              const Eigen::VectorXd& beta,
                              const Eigen::MatrixXd& X_train,
                              const Eigen::MatrixXd& X_test);

/// Bank with K_i = U D_i U^T sharing the orthogonal eigenbasis U.
KernelBank make_simdiag_bank(const Eigen::MatrixXd& U,
                             const std::vector<Eigen::VectorXd>& diagonals);

/// Order-preserving kernel bank config: one record per line or a JSON list,
/// see load_kernel_config.
std::vector<KernelSpec> load_kernel_config(const std::string& path);
std::vector<KernelSpec> parse_kernel_config(const std::string& text);

/// The ten-member default bank: linear; polynomial d in {2,3,5} (c0=1,
/// alpha=0.01); RBF gamma in {0.5,0.3,0.1}; sigmoid c0=1, gamma in {0.5,0.7};
/// Laplacian gamma=0.3.
std::vector<KernelSpec> default_kernel_specs();

KernelBank build_bank(const std::vector<KernelSpec>& specs,
                      const Eigen::MatrixXd& X, double jitter = kDefaultJitter);

}  // namespace smkl
