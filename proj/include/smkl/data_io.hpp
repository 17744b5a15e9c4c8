#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "smkl/svm.hpp"

namespace smkl {

/// Parsed, fully numeric dataset: categoricals one-hot encoded, labels
/// mapped to {-1, +1}.
struct RawDataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> feature_names;
  int dropped_rows = 0;             // rows removed for missing values
  std::vector<std::string> warnings;
};

/// Column roles for load_csv. JSON file:
///   {"label": "class", "positive": "0",
///    "categorical": ["color"], "delimiter": ","}
/// Columns not listed as categorical parse as numeric. "positive" names the
/// label value mapped to +1; every other label value maps to -1.
struct DataSchema {
  std::string label_column;
  std::string positive_value;
  std::vector<std::string> categorical_columns;
  char delimiter = ',';

  static DataSchema from_json(const std::string& text);
  static DataSchema load(const std::string& path);
};

RawDataset load_csv(const std::string& path, const DataSchema& schema);

struct SplitDataset {
  TrainingSet train;
  TrainingSet test;
  Eigen::VectorXd mean;  // train-only statistics
  Eigen::VectorXd std;   // 1.0 for constant columns (passed through)
  std::uint64_t seed = 0;
};

/// Deterministic shuffle, 80/20 split (round(frac*n) train rows), then
/// standardization with train-only statistics. Constant train columns
/// (std < 1e-12) pass through unscaled.
SplitDataset split_standardize(const RawDataset& raw, std::uint64_t seed,
                               double train_frac = 0.8);

}  // namespace smkl
