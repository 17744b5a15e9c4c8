#include <cmath>
#include <random>

#include "doctest.h"
#include "smkl/kernels.hpp"

using namespace smkl;

TEST_SUITE_BEGIN("kernels");

namespace {
Eigen::MatrixXd small_points() {
  Eigen::MatrixXd X(4, 2);
  X << 0.0, 1.0, 1.5, -0.5, -1.0, 2.0, 0.25, 0.75;
  return X;
}
}  // namespace

TEST_CASE("linear gram matches dot products plus jitter") {
  Eigen::MatrixXd X = small_points();
  GramMatrix g = compute_gram(KernelSpec::linear(), X);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double expect = X.row(i).dot(X.row(j)) + (i == j ? kDefaultJitter : 0.0);
      CHECK(g.entries(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  CHECK(g.indefinite_shift == 0.0);
}

TEST_CASE("rbf and laplacian follow their distance formulas") {
  Eigen::MatrixXd X = small_points();
  GramMatrix rbf = compute_gram(KernelSpec::rbf(0.5), X, 0.0);
  GramMatrix lap = compute_gram(KernelSpec::laplacian(0.3), X, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double d2 = (X.row(i) - X.row(j)).squaredNorm();
      double d1 = (X.row(i) - X.row(j)).cwiseAbs().sum();
      CHECK(rbf.entries(i, j) == doctest::Approx(std::exp(-0.5 * d2)).epsilon(1e-12));
      CHECK(lap.entries(i, j) == doctest::Approx(std::exp(-0.3 * d1)).epsilon(1e-12));
    }
  CHECK(rbf.entries(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("polynomial formula and validation") {
  Eigen::MatrixXd X = small_points();
  KernelSpec spec = KernelSpec::polynomial(3, 0.01, 1.0);
  GramMatrix g = compute_gram(spec, X, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double expect = std::pow(0.01 * X.row(i).dot(X.row(j)) + 1.0, 3);
      CHECK(g.entries(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  CHECK_THROWS_AS(KernelSpec::polynomial(0, 0.01, 1.0).validate(), InputError);
}

TEST_CASE("sigmoid gram is shifted to be positive semidefinite") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(12, 3);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = gauss(rng);
  GramMatrix g = compute_gram(KernelSpec::sigmoid(0.5, 1.0), X);
  CHECK(g.min_eigenvalue() >= -1e-9);
  // The raw tanh matrix is indefinite for generic data, so a shift is logged.
  CHECK(g.indefinite_shift >= 0.0);
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) {
      double raw = std::tanh(0.5 * X.row(i).dot(X.row(j)) + 1.0);
      CHECK(g.entries(i, j) == doctest::Approx(raw).epsilon(1e-12));
    }
}

TEST_CASE("combine is the entrywise convex combination") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(6, 2);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 2; ++j) X(i, j) = gauss(rng);
  KernelBank bank = build_bank({KernelSpec::linear(), KernelSpec::rbf(0.5),
                                KernelSpec::laplacian(0.3)}, X);
  Eigen::VectorXd beta(3);
  beta << 0.2, 0.5, 0.3;
  GramMatrix mixed = combine(bank, beta);
  Eigen::MatrixXd expect =
      0.2 * bank[0] + 0.5 * bank[1] + 0.3 * bank[2];
  CHECK((mixed.entries - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("combine_cross matches the per-kernel block combination") {
  Eigen::MatrixXd Xtr = small_points();
  Eigen::MatrixXd Xte(2, 2);
  Xte << 0.3, -0.2, 1.1, 0.4;
  std::vector<KernelSpec> specs{KernelSpec::rbf(0.5), KernelSpec::linear()};
  Eigen::VectorXd beta(2);
  beta << 0.7, 0.3;
  Eigen::MatrixXd got = combine_cross(specs, beta, Xtr, Xte);
  Eigen::MatrixXd expect = 0.7 * compute_kernel_block(specs[0], Xtr, Xte) +
                           0.3 * compute_kernel_block(specs[1], Xtr, Xte);
  REQUIRE(got.rows() == 4);
  REQUIRE(got.cols() == 2);
  CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("default bank holds the ten documented members") {
  std::vector<KernelSpec> specs = default_kernel_specs();
  REQUIRE(specs.size() == 10);
  int linear = 0, poly = 0, rbf = 0, sig = 0, lap = 0;
  for (const auto& s : specs) {
    switch (s.family) {
      case KernelFamily::Linear: ++linear; break;
      case KernelFamily::Polynomial: ++poly; CHECK(s.scale == 0.01); CHECK(s.offset == 1.0); break;
      case KernelFamily::RBF: ++rbf; break;
      case KernelFamily::Sigmoid: ++sig; CHECK(s.offset == 1.0); break;
      case KernelFamily::Laplacian: ++lap; CHECK(s.gamma == 0.3); break;
    }
  }
  CHECK(linear == 1);
  CHECK(poly == 3);
  CHECK(rbf == 3);
  CHECK(sig == 2);
  CHECK(lap == 1);
}

TEST_CASE("kernel config parses json records in order") {
  std::vector<KernelSpec> specs = parse_kernel_config(
      R"([{"family": "rbf", "gamma": 0.5},
          {"family": "polynomial", "degree": 2, "scale": 0.01, "offset": 1.0},
          {"family": "linear"}])");
  REQUIRE(specs.size() == 3);
  CHECK(specs[0].family == KernelFamily::RBF);
  CHECK(specs[0].gamma == 0.5);
  CHECK(specs[1].degree == 2);
  CHECK(specs[2].family == KernelFamily::Linear);
  CHECK_THROWS_AS(parse_kernel_config(R"([{"family": "cubic"}])"), InputError);
}

TEST_CASE("simdiag bank shares the requested eigenbasis") {
  Eigen::MatrixXd M(3, 3);
  M << 1, 2, 0, 0, 1, 1, 1, 0, 1;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd U = qr.householderQ();
  Eigen::VectorXd d1(3), d2(3);
  d1 << 2.0, 1.0, 0.5;
  d2 << 0.25, 3.0, 1.5;
  KernelBank bank = make_simdiag_bank(U, {d1, d2});
  REQUIRE(bank.q() == 2);
  CHECK((bank[0] - U * d1.asDiagonal() * U.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((bank[1] - U * d2.asDiagonal() * U.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((bank[0] - bank[0].transpose()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("family names round trip") {
  for (auto f : {KernelFamily::Linear, KernelFamily::Polynomial, KernelFamily::RBF,
                 KernelFamily::Sigmoid, KernelFamily::Laplacian})
    CHECK(family_from_name(family_name(f)) == f);
  CHECK_THROWS_AS(family_from_name("fourier"), InputError);
}

TEST_SUITE_END();
