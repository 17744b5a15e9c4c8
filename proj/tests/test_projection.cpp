#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "smkl/projection.hpp"

using namespace smkl;
using namespace smkl::testing;

TEST_SUITE_BEGIN("projection");

TEST_CASE("gssp hand example: top-2 then simplex projection") {
  Eigen::VectorXd w(3);
  w << 0.5, 0.3, 0.2;
  KernelWeights kw = gssp_project(w, 2);
  CHECK(kw.beta[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(kw.beta[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(kw.beta[2] == 0.0);
  CHECK(kw.nnz() == 2);
}

TEST_CASE("gssp matches the brute-force support oracle") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> qs(1, 8);
  for (int trial = 0; trial < 300; ++trial) {
    int q = qs(rng);
    std::uniform_int_distribution<int> ks(1, q);
    int k0 = ks(rng);
    Eigen::VectorXd w(q);
    for (int i = 0; i < q; ++i) w[i] = 2.0 * gauss(rng);
    KernelWeights kw = gssp_project(w, k0);
    double oracle_d = 0.0;
    sparse_simplex_oracle(w, k0, &oracle_d);
    double got_d = (kw.beta - w).squaredNorm();
    CHECK(std::abs(got_d - oracle_d) <= 1e-9);
    // Feasibility of the returned point.
    CHECK(kw.beta.sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(kw.beta.minCoeff() >= -1e-15);
    CHECK(kw.nnz(1e-15) <= k0);
  }
}

TEST_CASE("gssp ties break toward the lower index") {
  Eigen::VectorXd w(4);
  w << 0.4, 0.7, 0.7, 0.1;
  KernelWeights kw = gssp_project(w, 1);
  CHECK(kw.beta[1] == doctest::Approx(1.0));
  CHECK(kw.beta[2] == 0.0);
}

TEST_CASE("margin vector matches its quadratic-form definition") {
  std::mt19937_64 rng(5);
  KernelBank bank = random_bank(7, 3, rng);
  Eigen::VectorXd y = random_labels(7, rng);
  Eigen::VectorXd alpha(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 7; ++i) alpha[i] = unif(rng);
  Eigen::VectorXd d = margin_vector(bank, y, alpha);
  Eigen::VectorXd u = y.cwiseProduct(alpha);
  REQUIRE(d.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK(d[i] == doctest::Approx(u.dot(bank[i] * u)).epsilon(1e-12));
}

TEST_CASE("beta best response is gssp of the scaled margin vector") {
  std::mt19937_64 rng(6);
  KernelBank bank = random_bank(6, 4, rng);
  Eigen::VectorXd y = random_labels(6, rng);
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(6, 0.5);
  double lambda = 0.7;
  KernelWeights br = beta_best_response(bank, y, alpha, lambda, 2);
  Eigen::VectorXd d = margin_vector(bank, y, alpha);
  KernelWeights direct = gssp_project(d / (4.0 * lambda), 2);
  CHECK((br.beta - direct.beta).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("weights validation rejects malformed inputs") {
  KernelWeights kw;
  kw.beta = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  kw.k0 = 3;
  CHECK_NOTHROW(kw.validate());
  kw.k0 = 0;
  CHECK_THROWS_AS(kw.validate(), InputError);
  Eigen::VectorXd w(2);
  w << 1.0, 0.0;
  CHECK_THROWS_AS(gssp_project(w, 0), InputError);
}

TEST_SUITE_END();
