#include "smkl/model_select.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

namespace smkl {

void CvGrid::validate() const {
  if (C_values.empty() || lambda_values.empty() || k0_values.empty())
    throw InputError("grid lists must be nonempty");
  if (folds < 2) throw InputError("folds must be >= 2");
  for (double c : C_values)
    if (c <= 0.0) throw InputError("grid C values must be positive");
  for (double l : lambda_values)
    if (l <= 0.0) throw InputError("grid lambda values must be positive");
  for (int k : k0_values)
    if (k < 1) throw InputError("grid k0 values must be >= 1");
}

CvGrid CvGrid::defaults() {
  CvGrid g;
  g.C_values = {5.0, 10.0, 50.0, 100.0};
  g.lambda_values = {0.01, 0.1, 1.0, 10.0, 100.0};
  g.k0_values = {1, 2, 3, 4, 5};
  g.folds = 10;
  return g;
}

namespace {

double accuracy_percent(const Eigen::VectorXd& predicted,
                        const Eigen::VectorXd& truth) {
  int correct = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i)
    if (predicted[i] == truth[i]) ++correct;
  return 100.0 * correct / static_cast<double>(truth.size());
}

// Train on rows 'tr', score on rows 'va'; returns percent accuracy.
double fold_accuracy(const TrainingSet& data, const std::vector<KernelSpec>& specs,
                     const SmklConfig& config, const std::vector<int>& tr,
                     const std::vector<int>& va,
                     std::vector<std::string>* warnings) {
  Eigen::MatrixXd Xtr(tr.size(), data.X.cols()), Xva(va.size(), data.X.cols());
  Eigen::VectorXd ytr(tr.size()), yva(va.size());
  for (size_t i = 0; i < tr.size(); ++i) {
    Xtr.row(i) = data.X.row(tr[i]);
    ytr[i] = data.y[tr[i]];
  }
  for (size_t i = 0; i < va.size(); ++i) {
    Xva.row(i) = data.X.row(va[i]);
    yva[i] = data.y[va[i]];
  }
  bool pos = (ytr.array() > 0).any(), neg = (ytr.array() < 0).any();
  if (!pos || !neg) {
    // Degenerate fold: constant predictor on the only class present.
    if (warnings)
      warnings->push_back("fold training split has a single class; using a "
                          "constant predictor");
    double label = pos ? 1.0 : -1.0;
    return accuracy_percent(Eigen::VectorXd::Constant(yva.size(), label), yva);
  }
  KernelBank bank = build_bank(specs, Xtr);
  SmklResult model = fit(bank, ytr, config);
  Eigen::MatrixXd cross = combine_cross(specs, model.beta.beta, Xtr, Xva);
  Eigen::VectorXd f = decision_values(model.alpha, cross, ytr);
  return accuracy_percent(predict_labels(f), yva);
}

}  // namespace

CvResult cross_validate(const TrainingSet& train,
                        const std::vector<KernelSpec>& specs,
                        const CvGrid& grid, std::uint64_t seed, int threads) {
  train.validate();
  grid.validate();
  const int n = static_cast<int>(train.n());
  if (n < grid.folds) throw InputError("fewer rows than folds");
  if (threads < 1) throw InputError("threads must be >= 1");

  // One fold assignment per seed, shared by every grid point.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int>> fold_of(grid.folds);
  for (int i = 0; i < n; ++i) fold_of[i % grid.folds].push_back(order[i]);

  std::vector<SmklConfig> points;
  for (int k0 : grid.k0_values)
    for (double C : grid.C_values)
      for (double lambda : grid.lambda_values) {
        SmklConfig c;
        c.C = C;
        c.lambda = lambda;
        c.k0 = std::min(k0, static_cast<int>(specs.size()));
        c.seed = seed;
        points.push_back(c);
      }

  CvResult result;
  result.log.resize(points.size());
  std::vector<std::vector<std::string>> point_warnings(points.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t p = next.fetch_add(1);
      if (p >= points.size()) return;
      CvCell cell;
      cell.config = points[p];
      for (int f = 0; f < grid.folds; ++f) {
        std::vector<int> tr;
        for (int g = 0; g < grid.folds; ++g)
          if (g != f) tr.insert(tr.end(), fold_of[g].begin(), fold_of[g].end());
        cell.fold_accuracy.push_back(fold_accuracy(
            train, specs, points[p], tr, fold_of[f], &point_warnings[p]));
      }
      cell.mean_accuracy =
          std::accumulate(cell.fold_accuracy.begin(), cell.fold_accuracy.end(),
                          0.0) /
          cell.fold_accuracy.size();
      result.log[p] = std::move(cell);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& w : point_warnings)
    result.warnings.insert(result.warnings.end(), w.begin(), w.end());

  // Deterministic argmax with the parsimony tie-break.
  size_t best = 0;
  auto better = [&](size_t a, size_t b) {  // true when a beats b
    const CvCell &ca = result.log[a], &cb = result.log[b];
    if (ca.mean_accuracy != cb.mean_accuracy)
      return ca.mean_accuracy > cb.mean_accuracy;
    if (ca.config.k0 != cb.config.k0) return ca.config.k0 < cb.config.k0;
    if (ca.config.C != cb.config.C) return ca.config.C < cb.config.C;
    if (ca.config.lambda != cb.config.lambda)
      return ca.config.lambda > cb.config.lambda;
    return a < b;
  };
  for (size_t p = 1; p < points.size(); ++p)
    if (better(p, best)) best = p;
  result.best = result.log[best].config;
  result.best_accuracy = result.log[best].mean_accuracy;
  return result;
}

void write_cv_log(const std::string& path, const CvResult& result) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write cv log: " + path);
  out << "C,lambda,k0";
  if (!result.log.empty())
    for (size_t f = 0; f < result.log.front().fold_accuracy.size(); ++f)
      out << ",fold" << f;
  out << ",mean\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& cell : result.log) {
    out << num(cell.config.C) << "," << num(cell.config.lambda) << ","
        << cell.config.k0;
    for (double a : cell.fold_accuracy) out << "," << num(a);
    out << "," << num(cell.mean_accuracy) << "\n";
  }
}

EvalReport evaluate(const SmklResult& model,
                    const std::vector<KernelSpec>& specs,
                    const SplitDataset& split, const SmklConfig& config,
                    double train_time_sec) {
  if (model.beta.beta.size() != static_cast<Eigen::Index>(specs.size()))
    throw InputError("fitted weights do not match the kernel spec list");
  Eigen::MatrixXd cross =
      combine_cross(specs, model.beta.beta, split.train.X, split.test.X);
  Eigen::VectorXd f = decision_values(model.alpha, cross, split.train.y);
  EvalReport report;
  report.accuracy = accuracy_percent(predict_labels(f), split.test.y);
  report.nnz_beta = model.beta.nnz(1e-3);
  report.train_time_sec = train_time_sec;
  report.config = config;
  return report;
}

}  // namespace smkl
