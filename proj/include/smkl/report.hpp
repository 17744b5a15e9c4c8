#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smkl/model_select.hpp"
#include "smkl/relaxations.hpp"
#include "smkl/solver.hpp"

namespace smkl {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportHeader = "SMKL-REPORT 1";

/// One certification level's row in a run report. Levels that could not be
/// solved within the memory budget appear with available=false.
struct CertificationEntry {
  std::string level;
  bool available = false;
  std::string note;  // e.g. the capacity-error message
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double gap_over_upper = 0.0;  // definition convention
  double gap_over_lower = 0.0;  // table convention
  bool globally_optimal = false;
  std::string status;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double wall_time_sec = 0.0;
};

struct RunReport {
  std::string command;  // train | certify | cv
  std::string dataset;
  std::string kernel_config;
  SmklConfig config;
  std::uint64_t split_seed = 0;
  Eigen::VectorXd beta;
  std::vector<int> support;
  std::optional<double> accuracy;
  std::optional<int> nnz_beta;
  std::vector<TraceEntry> trace;
  double best_objective = 0.0;
  int iterations_run = 0;
  std::string stop_reason;
  std::vector<CertificationEntry> certification;
  double wall_time_sec = 0.0;
  std::string timestamp;  // the only non-reproducible field
};

/// Versioned key-value text format; numbers at 17 significant digits.
void write_report(std::ostream& os, const RunReport& report);
void write_report_file(const std::string& path, const RunReport& report);

}  // namespace smkl
