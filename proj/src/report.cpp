#include "smkl/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace smkl {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_report(std::ostream& os, const RunReport& r) {
  os << kReportHeader << "\n";
  os << "version " << kToolVersion << "\n";
  os << "command " << r.command << "\n";
  os << "timestamp " << (r.timestamp.empty() ? "-" : r.timestamp) << "\n";
  if (!r.dataset.empty()) os << "dataset " << r.dataset << "\n";
  if (!r.kernel_config.empty()) os << "kernels " << r.kernel_config << "\n";

  os << "[config]\n";
  os << "C " << num(r.config.C) << "\n";
  os << "lambda " << num(r.config.lambda) << "\n";
  os << "k0 " << r.config.k0 << "\n";
  os << "eps " << num(r.config.eps) << "\n";
  os << "patience " << r.config.patience << "\n";
  os << "max_iter " << r.config.max_iter << "\n";
  os << "seed " << r.config.seed << "\n";
  os << "split_seed " << r.split_seed << "\n";
  os << "init "
     << (r.config.init == InitStrategy::WarmStart ? "warm" : "random") << "\n";

  if (r.beta.size() > 0) {
    os << "[solution]\n";
    os << "beta";
    for (Eigen::Index i = 0; i < r.beta.size(); ++i) os << " " << num(r.beta[i]);
    os << "\n";
    os << "support";
    for (int s : r.support) os << " " << s;
    os << "\n";
    os << "best_objective " << num(r.best_objective) << "\n";
    os << "iterations " << r.iterations_run << "\n";
    os << "stop_reason " << r.stop_reason << "\n";
    if (r.accuracy) os << "accuracy " << num(*r.accuracy) << "\n";
    if (r.nnz_beta) os << "nnz_beta " << *r.nnz_beta << "\n";
  }

  if (!r.trace.empty()) {
    os << "[trace]\n";
    for (const auto& t : r.trace)
      os << t.iteration << " " << num(t.objective) << " " << t.non_decrease
         << "\n";
  }

  if (!r.certification.empty()) {
    os << "[certification]\n";
    for (const auto& c : r.certification) {
      os << "level " << c.level << "\n";
      if (!c.available) {
        os << "  unavailable " << c.note << "\n";
        continue;
      }
      os << "  lower_bound " << num(c.lower_bound) << "\n";
      os << "  upper_bound " << num(c.upper_bound) << "\n";
      os << "  gap_over_upper " << num(c.gap_over_upper) << "\n";
      os << "  gap_over_lower " << num(c.gap_over_lower) << "\n";
      if (c.globally_optimal) os << "  globally_optimal_certificate yes\n";
      os << "  status " << c.status << "\n";
      os << "  primal_residual " << num(c.primal_residual) << "\n";
      os << "  dual_residual " << num(c.dual_residual) << "\n";
      os << "  wall_time_sec " << num(c.wall_time_sec) << "\n";
    }
  }
  os << "wall_time_sec " << num(r.wall_time_sec) << "\n";
}

void write_report_file(const std::string& path, const RunReport& report) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write report: " + path);
  write_report(out, report);
}

}  // namespace smkl
