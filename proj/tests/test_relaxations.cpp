#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "smkl/relaxations.hpp"
#include "smkl/solver.hpp"

using namespace smkl;
using namespace smkl::testing;

TEST_SUITE_BEGIN("relaxations");

namespace {

// Deterministic 8-point, 3-kernel instance. The expected bounds below were
// frozen from an independent convex-optimization stack (CVXPY/SCS at
// eps=1e-9) on the exact same Gram matrices.
struct FrozenInstance {
  KernelBank bank;
  Eigen::VectorXd y;
  double C = 1.0;
  double lambda = 0.1;
  int k0 = 2;
};

FrozenInstance frozen_instance() {
  int n = 8;
  Eigen::MatrixXd X(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j)
      X(i, j) = std::sin(1.3 * i + 0.7 * j) + 0.25 * std::cos(0.9 * i * j + 0.5);
  FrozenInstance inst;
  inst.y = Eigen::VectorXd(n);
  for (int i = 0; i < n; ++i) inst.y[i] = i < 4 ? 1.0 : -1.0;
  inst.bank = build_bank({KernelSpec::linear(), KernelSpec::rbf(0.5),
                          KernelSpec::laplacian(0.3)}, X);
  return inst;
}

constexpr double kFrozenSocBasis = 0.527018972;
constexpr double kFrozenSdp3x3 = 5.237542043;
constexpr double kFrozenSdpFull = 7.226002881;

double lower_bound(const FrozenInstance& inst, RelaxationLevel level) {
  ConicProgram prog;
  switch (level) {
    case RelaxationLevel::SocBasis:
      prog = build_soc_basis(inst.bank, inst.y, inst.C, inst.lambda, inst.k0);
      break;
    case RelaxationLevel::Sdp3x3:
      prog = build_sdp_3x3(inst.bank, inst.y, inst.C, inst.lambda, inst.k0);
      break;
    default:
      prog = build_full_sdp(inst.bank, inst.y, inst.C, inst.lambda, inst.k0);
      break;
  }
  RelaxationOutcome out = solve_relaxation(prog, level);
  REQUIRE(out.status == SolveStatus::Optimal);
  return out.lower_bound;
}

}  // namespace

TEST_CASE("relaxation bounds match the frozen external oracle") {
  FrozenInstance inst = frozen_instance();
  CHECK(lower_bound(inst, RelaxationLevel::SocBasis) ==
        doctest::Approx(kFrozenSocBasis).epsilon(1e-5));
  CHECK(lower_bound(inst, RelaxationLevel::Sdp3x3) ==
        doctest::Approx(kFrozenSdp3x3).epsilon(1e-5));
  CHECK(lower_bound(inst, RelaxationLevel::SdpFull) ==
        doctest::Approx(kFrozenSdpFull).epsilon(1e-5));
}

TEST_CASE("global enumeration agrees with the tight full relaxation") {
  FrozenInstance inst = frozen_instance();
  GlobalOptimum g = global_enumerate(inst.bank, inst.y, inst.C, inst.lambda, inst.k0);
  // On this instance the full relaxation is tight.
  CHECK(g.objective == doctest::Approx(kFrozenSdpFull).epsilon(1e-5));
  CHECK(g.support == std::vector<int>{1, 2});
  CHECK(g.beta.sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bound chain is ordered on random instances") {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::Index n = 7 + trial;
    KernelBank bank = random_bank(n, 3, rng);
    Eigen::VectorXd y = random_labels(n, rng);
    double C = 1.0, lambda = 0.2;
    int k0 = 2;
    auto lb = [&](const ConicProgram& p, RelaxationLevel lev) {
      return solve_relaxation(p, lev).lower_bound;
    };
    double basis = lb(build_soc_basis(bank, y, C, lambda, k0), RelaxationLevel::SocBasis);
    double rand16 = lb(build_soc_randomized(bank, y, C, lambda, k0, 16, 9),
                       RelaxationLevel::SocRandomized);
    double sdp3 = lb(build_sdp_3x3(bank, y, C, lambda, k0), RelaxationLevel::Sdp3x3);
    double full = lb(build_full_sdp(bank, y, C, lambda, k0), RelaxationLevel::SdpFull);
    GlobalOptimum g = global_enumerate(bank, y, C, lambda, k0);
    CHECK(basis <= rand16 + 1e-6);
    CHECK(basis <= sdp3 + 1e-6);
    CHECK(sdp3 <= full + 1e-6);
    CHECK(full <= g.objective + 1e-6);
  }
}

TEST_CASE("zero random rows degenerate to the basis relaxation") {
  FrozenInstance inst = frozen_instance();
  ConicProgram p = build_soc_randomized(inst.bank, inst.y, inst.C, inst.lambda,
                                        inst.k0, 0, 42);
  RelaxationOutcome out = solve_relaxation(p, RelaxationLevel::SocRandomized);
  CHECK(out.lower_bound == doctest::Approx(kFrozenSocBasis).epsilon(1e-5));
}

TEST_CASE("simultaneously diagonalizable banks: socp equals the full sdp") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    int n = 6 + 2 * trial, q = 2 + trial;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd U = qr.householderQ();
    std::vector<Eigen::VectorXd> diags;
    for (int i = 0; i < q; ++i) {
      Eigen::VectorXd d(n);
      for (int j = 0; j < n; ++j) d[j] = 0.1 + std::abs(gauss(rng));
      diags.push_back(d);
    }
    KernelBank bank = make_simdiag_bank(U, diags);
    Eigen::VectorXd y = random_labels(n, rng);
    double C = 1.0, lambda = 0.3;
    int k0 = std::min(2, q);
    double diag_lb = solve_relaxation(
        build_socp_diagonal(bank, y, C, lambda, k0, U, diags),
        RelaxationLevel::SocpDiagonal).lower_bound;
    double full_lb = solve_relaxation(
        build_full_sdp(bank, y, C, lambda, k0),
        RelaxationLevel::SdpFull).lower_bound;
    CHECK(std::abs(diag_lb - full_lb) <= 1e-5 * (1.0 + std::abs(full_lb)));
  }
}

TEST_CASE("diagonal builder rejects a basis that does not diagonalize") {
  FrozenInstance inst = frozen_instance();
  Eigen::MatrixXd U = Eigen::MatrixXd::Identity(8, 8);
  std::vector<Eigen::VectorXd> diags(3, Eigen::VectorXd::Ones(8));
  CHECK_THROWS_AS(
      build_socp_diagonal(inst.bank, inst.y, inst.C, inst.lambda, inst.k0, U, diags),
      InputError);
}

TEST_CASE("warm start extraction: top-z support with l1 rescaling") {
  RelaxationOutcome out;
  out.vars.z = Eigen::VectorXd(3);
  out.vars.z << 0.9, 0.6, 0.5;
  out.vars.beta = Eigen::VectorXd(3);
  out.vars.beta << 0.5, 0.3, 0.2;
  KernelWeights w = extract_warm_start(out, 2);
  CHECK(w.beta[0] == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(w.beta[1] == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(w.beta[2] == 0.0);

  // Vanishing mass on the selected support falls back to uniform weights.
  out.vars.beta << 0.0, 0.0, 1.0;
  out.vars.z << 0.9, 0.8, 0.0;
  KernelWeights u = extract_warm_start(out, 2);
  CHECK(u.beta[0] == doctest::Approx(0.5));
  CHECK(u.beta[1] == doctest::Approx(0.5));
}

TEST_CASE("gap report supports both denominator conventions") {
  GapReport g = certify_gap(16.78, 14.69);
  CHECK(g.gap_over_lower == doctest::Approx(14.23).epsilon(0.0005));
  CHECK(g.gap_over_upper == doctest::Approx(100.0 * (16.78 - 14.69) / 16.78).epsilon(1e-10));
  GapReport zero = certify_gap(5.0, 5.0);
  CHECK(zero.gap_over_lower == 0.0);
  // Slightly crossed bounds inside tolerance clamp to zero...
  CHECK(certify_gap(5.0, 5.0 + 1e-9).gap_over_upper == 0.0);
  // ...while a real inversion is a hard error.
  CHECK_THROWS_AS(certify_gap(5.0, 5.1), NumericalError);
}

TEST_CASE("enumeration budget guards combinatorial blowups") {
  std::mt19937_64 rng(1);
  KernelBank bank = random_bank(5, 12, rng);
  Eigen::VectorXd y = random_labels(5, rng);
  CHECK_THROWS_AS(global_enumerate(bank, y, 1.0, 0.1, 6, 100), CapacityError);
}

TEST_CASE("level names round trip") {
  for (auto lev : {RelaxationLevel::SocBasis, RelaxationLevel::SocRandomized,
                   RelaxationLevel::Sdp3x3, RelaxationLevel::SdpFull,
                   RelaxationLevel::SocpDiagonal})
    CHECK(relaxation_from_name(relaxation_name(lev)) == lev);
  CHECK_THROWS_AS(relaxation_from_name("sdp-9x9"), InputError);
}

TEST_SUITE_END();
