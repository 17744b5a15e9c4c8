#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smkl/data_io.hpp"
#include "smkl/model_select.hpp"
#include "smkl/relaxations.hpp"
#include "smkl/solver.hpp"

namespace py = pybind11;
using namespace smkl;

namespace {

SmklConfig config_from_kwargs(double C, double lambda, int k0, double eps,
                              int patience, int max_iter, std::uint64_t seed,
                              std::optional<Eigen::VectorXd> warm_start) {
  SmklConfig c;
  c.C = C;
  c.lambda = lambda;
  c.k0 = k0;
  c.eps = eps;
  c.patience = patience;
  c.max_iter = max_iter;
  c.seed = seed;
  if (warm_start) {
    c.init = InitStrategy::WarmStart;
    KernelWeights w;
    w.beta = *warm_start;
    w.k0 = k0;
    c.warm_start = w;
  }
  return c;
}

RelaxationOutcome solve_level(const KernelBank& bank, const Eigen::VectorXd& y,
                              double C, double lambda, int k0,
                              const std::string& level_name, int rand_vectors,
                              std::uint64_t seed, double mem_budget_mb) {
  RelaxationLevel level = relaxation_from_name(level_name);
  SolverOptions opts;
  opts.mem_budget_mb = mem_budget_mb;
  ConicProgram prog = [&] {
    switch (level) {
      case RelaxationLevel::SocBasis:
        return build_soc_basis(bank, y, C, lambda, k0);
      case RelaxationLevel::SocRandomized:
        return build_soc_randomized(bank, y, C, lambda, k0, rand_vectors, seed);
      case RelaxationLevel::Sdp3x3:
        return build_sdp_3x3(bank, y, C, lambda, k0);
      default:
        return build_full_sdp(bank, y, C, lambda, k0);
    }
  }();
  return solve_relaxation(prog, level, opts);
}

}  // namespace

PYBIND11_MODULE(_smkl, m) {
  m.doc() = "Sparse multiple kernel learning core";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static("linear", &KernelSpec::linear)
      .def_static("polynomial", &KernelSpec::polynomial, py::arg("degree"),
                  py::arg("scale"), py::arg("offset"))
      .def_static("rbf", &KernelSpec::rbf, py::arg("gamma"))
      .def_static("sigmoid", &KernelSpec::sigmoid, py::arg("gamma"),
                  py::arg("offset"))
      .def_static("laplacian", &KernelSpec::laplacian, py::arg("gamma"))
      .def("__repr__", &KernelSpec::describe);

  m.def("default_kernel_specs", &default_kernel_specs,
        "The 10-member default kernel bank");

  py::class_<KernelBank>(m, "KernelBank")
      .def_property_readonly("q", &KernelBank::q)
      .def_property_readonly("n", &KernelBank::n)
      .def("__len__", &KernelBank::q)
      .def("__getitem__",
           [](const KernelBank& b, int i) -> Eigen::MatrixXd {
             if (i < 0 || i >= b.q()) throw py::index_error();
             return b[i];
           });

  m.def(
      "build_bank",
      [](const std::vector<KernelSpec>& specs, const Eigen::MatrixXd& X,
         double jitter) { return build_bank(specs, X, jitter); },
      py::arg("specs"), py::arg("X"), py::arg("jitter") = kDefaultJitter);

  m.def(
      "gssp_project",
      [](const Eigen::VectorXd& w, int k0) { return gssp_project(w, k0).beta; },
      py::arg("w"), py::arg("k0"),
      "Euclidean projection onto the k0-sparse unit simplex");

  py::class_<DualSolution>(m, "DualSolution")
      .def_readonly("alpha", &DualSolution::alpha)
      .def_readonly("bias", &DualSolution::bias)
      .def_readonly("dual_objective", &DualSolution::dual_objective)
      .def_readonly("support_indices", &DualSolution::support_indices)
      .def_readonly("iterations", &DualSolution::iterations)
      .def_readonly("kkt_residual", &DualSolution::kkt_residual);

  m.def(
      "solve_dual",
      [](const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C,
         double kkt_tol) {
        GramMatrix g;
        g.entries = K;
        return solve_dual(g, y, C, kkt_tol);
      },
      py::arg("K"), py::arg("y"), py::arg("C"), py::arg("kkt_tol") = 1e-6,
      "SMO solver for the SVM dual with a fixed kernel");

  py::class_<TraceEntry>(m, "TraceEntry")
      .def_readonly("iteration", &TraceEntry::iteration)
      .def_readonly("objective", &TraceEntry::objective)
      .def_readonly("non_decrease", &TraceEntry::non_decrease);

  py::class_<SmklResult>(m, "SmklResult")
      .def_property_readonly("alpha",
                             [](const SmklResult& r) { return r.alpha.alpha; })
      .def_property_readonly("bias",
                             [](const SmklResult& r) { return r.alpha.bias; })
      .def_property_readonly("beta",
                             [](const SmklResult& r) { return r.beta.beta; })
      .def_readonly("best_objective", &SmklResult::best_objective)
      .def_readonly("iterations_run", &SmklResult::iterations_run)
      .def_readonly("objective_trace", &SmklResult::objective_trace)
      .def_property_readonly("stalled", [](const SmklResult& r) {
        return r.stop_reason == StopReason::Stalled;
      });

  m.def(
      "fit",
      [](const KernelBank& bank, const Eigen::VectorXd& y, double C,
         double lambda, int k0, double eps, int patience, int max_iter,
         std::uint64_t seed, std::optional<Eigen::VectorXd> warm_start) {
        return fit(bank, y,
                   config_from_kwargs(C, lambda, k0, eps, patience, max_iter,
                                      seed, std::move(warm_start)));
      },
      py::arg("bank"), py::arg("y"), py::arg("C"), py::arg("lambda_"),
      py::arg("k0"), py::arg("eps") = 1e-6, py::arg("patience") = 3,
      py::arg("max_iter") = 100, py::arg("seed") = 0,
      py::arg("warm_start") = std::nullopt,
      "Alternating best-response fit of the sparse kernel mix");

  py::class_<RelaxationOutcome>(m, "RelaxationOutcome")
      .def_readonly("lower_bound", &RelaxationOutcome::lower_bound)
      .def_property_readonly(
          "level",
          [](const RelaxationOutcome& o) { return relaxation_name(o.level); })
      .def_property_readonly(
          "status",
          [](const RelaxationOutcome& o) { return status_name(o.status); })
      .def_property_readonly("beta",
                             [](const RelaxationOutcome& o) { return o.vars.beta; })
      .def_property_readonly("z",
                             [](const RelaxationOutcome& o) { return o.vars.z; })
      .def_readonly("iterations", &RelaxationOutcome::iterations)
      .def_readonly("wall_time_sec", &RelaxationOutcome::wall_time_sec);

  m.def("relaxation_lower_bound", &solve_level, py::arg("bank"), py::arg("y"),
        py::arg("C"), py::arg("lambda_"), py::arg("k0"), py::arg("level"),
        py::arg("rand_vectors") = 64, py::arg("seed") = 0,
        py::arg("mem_budget_mb") = 1024.0,
        "Build and solve one conic relaxation; level is one of soc-basis, "
        "soc-rand, sdp-3x3, sdp-full");

  m.def(
      "extract_warm_start",
      [](const RelaxationOutcome& o, int k0) {
        return extract_warm_start(o, k0).beta;
      },
      py::arg("outcome"), py::arg("k0"));

  py::class_<GapReport>(m, "GapReport")
      .def_readonly("upper", &GapReport::upper)
      .def_readonly("lower", &GapReport::lower)
      .def_readonly("gap_over_upper", &GapReport::gap_over_upper)
      .def_readonly("gap_over_lower", &GapReport::gap_over_lower);

  m.def("certify_gap", &certify_gap, py::arg("upper"), py::arg("lower"),
        py::arg("tol") = 1e-6);

  py::class_<GlobalOptimum>(m, "GlobalOptimum")
      .def_readonly("objective", &GlobalOptimum::objective)
      .def_readonly("beta", &GlobalOptimum::beta)
      .def_readonly("support", &GlobalOptimum::support);

  m.def(
      "global_enumerate",
      [](const KernelBank& bank, const Eigen::VectorXd& y, double C,
         double lambda, int k0, long budget) {
        return global_enumerate(bank, y, C, lambda, k0, budget);
      },
      py::arg("bank"), py::arg("y"), py::arg("C"), py::arg("lambda_"),
      py::arg("k0"), py::arg("budget") = 1000,
      "Exact optimum by support enumeration (tiny instances)");

  m.def(
      "decision_values",
      [](const Eigen::VectorXd& alpha, double bias,
         const Eigen::MatrixXd& K_cross, const Eigen::VectorXd& y) {
        DualSolution d;
        d.alpha = alpha;
        d.bias = bias;
        return decision_values(d, K_cross, y);
      },
      py::arg("alpha"), py::arg("bias"), py::arg("K_cross"), py::arg("y"));

  m.def(
      "combine_cross",
      [](const std::vector<KernelSpec>& specs, const Eigen::VectorXd& beta,
         const Eigen::MatrixXd& X_train, const Eigen::MatrixXd& X_test) {
        return combine_cross(specs, beta, X_train, X_test);
      },
      py::arg("specs"), py::arg("beta"), py::arg("X_train"), py::arg("X_test"));
}
