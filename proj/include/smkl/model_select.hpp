#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "smkl/data_io.hpp"
#include "smkl/solver.hpp"

namespace smkl {

struct CvGrid {
  std::vector<double> C_values;
  std::vector<double> lambda_values;
  std::vector<int> k0_values;
  int folds = 10;

  void validate() const;
  /// The protocol grid: C in {5,10,50,100}, lambda in {0.01,0.1,1,10,100},
  /// k0 in {1..5}, 10 folds.
  static CvGrid defaults();
};

/// One grid point's cross-validation record.
struct CvCell {
  SmklConfig config;
  std::vector<double> fold_accuracy;  // percent, one per fold
  double mean_accuracy = 0.0;
};

struct CvResult {
  SmklConfig best;
  double best_accuracy = 0.0;
  std::vector<CvCell> log;
  std::vector<std::string> warnings;
};

/// Deterministic k-fold grid search over (C, lambda, k0) with fixed kernel
/// specs. Folds are assigned once per seed and reused at every grid point.
/// Ties break toward smaller k0, then smaller C, then larger lambda, then
/// grid order. threads > 1 fans grid points across a pool; the reduction is
/// deterministic regardless of thread count.
CvResult cross_validate(const TrainingSet& train,
                        const std::vector<KernelSpec>& specs,
                        const CvGrid& grid, std::uint64_t seed,
                        int threads = 1);

/// Audit trail: one CSV line per grid point with fold and mean accuracies.
void write_cv_log(const std::string& path, const CvResult& result);

struct EvalReport {
  double accuracy = 0.0;  // percent correct on the test split
  int nnz_beta = 0;       // |beta_j| > 1e-3
  double train_time_sec = 0.0;
  SmklConfig config;
};

/// Test-set evaluation of a fitted model using cross-kernel blocks built
/// from the training kernel specs and the fitted weights.
EvalReport evaluate(const SmklResult& model,
                    const std::vector<KernelSpec>& specs,
                    const SplitDataset& split, const SmklConfig& config,
                    double train_time_sec = 0.0);

}  // namespace smkl
