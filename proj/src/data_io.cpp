#include "smkl/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace smkl {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DataSchema DataSchema::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("schema is not valid JSON: ") + e.what());
  }
  DataSchema s;
  if (!j.contains("label") || !j["label"].is_string())
    throw InputError("schema must name a \"label\" column");
  s.label_column = j["label"].get<std::string>();
  if (j.contains("positive")) {
    if (j["positive"].is_string())
      s.positive_value = j["positive"].get<std::string>();
    else
      s.positive_value = j["positive"].dump();
  } else {
    throw InputError("schema must define the \"positive\" label value");
  }
  if (j.contains("categorical"))
    for (const auto& c : j["categorical"])
      s.categorical_columns.push_back(c.get<std::string>());
  if (j.contains("delimiter")) {
    std::string d = j["delimiter"].get<std::string>();
    if (d.size() != 1) throw InputError("delimiter must be one character");
    s.delimiter = d[0];
  }
  return s;
}

DataSchema DataSchema::load(const std::string& path) {
  return from_json(read_file(path));
}

RawDataset load_csv(const std::string& path, const DataSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw InputError("empty file: " + path);
  std::vector<std::string> header = split_line(line, schema.delimiter);

  int label_col = -1;
  std::vector<bool> is_cat(header.size(), false);
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.label_column) label_col = static_cast<int>(c);
    if (std::find(schema.categorical_columns.begin(),
                  schema.categorical_columns.end(),
                  header[c]) != schema.categorical_columns.end())
      is_cat[c] = true;
  }
  if (label_col < 0)
    throw InputError("label column \"" + schema.label_column +
                     "\" not found in header of " + path);
  for (const auto& name : schema.categorical_columns)
    if (std::find(header.begin(), header.end(), name) == header.end())
      throw InputError("categorical column \"" + name + "\" not in header");

  RawDataset raw;
  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line, schema.delimiter);
    if (cells.size() != header.size())
      throw InputError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    bool missing = false;
    for (const auto& c : cells)
      if (c.empty()) missing = true;
    if (missing) {
      ++raw.dropped_rows;
      raw.warnings.push_back("row " + std::to_string(line_no) +
                             " dropped: missing value");
      continue;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.size() < 2) throw InputError("need at least 2 usable data rows");

  // Categorical level inventory; the lexicographically first level is the
  // omitted one-hot dimension.
  std::map<int, std::vector<std::string>> levels;
  for (size_t c = 0; c < header.size(); ++c) {
    if (!is_cat[c] || static_cast<int>(c) == label_col) continue;
    std::set<std::string> seen;
    for (const auto& r : rows) seen.insert(r[c]);
    levels[static_cast<int>(c)] =
        std::vector<std::string>(seen.begin(), seen.end());
  }

  for (size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == label_col) continue;
    if (is_cat[c]) {
      const auto& lv = levels[static_cast<int>(c)];
      for (size_t l = 1; l < lv.size(); ++l)
        raw.feature_names.push_back(header[c] + "=" + lv[l]);
    } else {
      raw.feature_names.push_back(header[c]);
    }
  }

  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(raw.feature_names.size());
  raw.X.resize(n, m);
  raw.y.resize(n);
  for (int r = 0; r < n; ++r) {
    int out = 0;
    for (size_t c = 0; c < header.size(); ++c) {
      if (static_cast<int>(c) == label_col) {
        raw.y[r] = rows[r][c] == schema.positive_value ? 1.0 : -1.0;
        continue;
      }
      if (is_cat[c]) {
        const auto& lv = levels[static_cast<int>(c)];
        auto it = std::find(lv.begin(), lv.end(), rows[r][c]);
        if (it == lv.end())
          throw InputError("unknown category \"" + rows[r][c] +
                           "\" in column " + header[c]);
        for (size_t l = 1; l < lv.size(); ++l)
          raw.X(r, out++) = (lv[l] == rows[r][c]) ? 1.0 : 0.0;
      } else {
        try {
          size_t pos = 0;
          raw.X(r, out) = std::stod(rows[r][c], &pos);
          if (pos != rows[r][c].size()) throw std::invalid_argument("trail");
        } catch (const std::exception&) {
          throw InputError(path + ": unparseable numeric cell \"" +
                           rows[r][c] + "\" at row " + std::to_string(r + 2) +
                           ", column " + header[c]);
        }
        ++out;
      }
    }
  }

  bool pos = false, neg = false;
  for (int r = 0; r < n; ++r) (raw.y[r] > 0 ? pos : neg) = true;
  if (!pos || !neg)
    throw InputError("labels map to a single class; check the schema's "
                     "\"positive\" value");
  return raw;
}

SplitDataset split_standardize(const RawDataset& raw, std::uint64_t seed,
                               double train_frac) {
  const int n = static_cast<int>(raw.X.rows());
  const int m = static_cast<int>(raw.X.cols());
  if (train_frac <= 0.0 || train_frac >= 1.0)
    throw InputError("train_frac must lie in (0, 1)");
  int n_train = static_cast<int>(std::llround(train_frac * n));
  n_train = std::clamp(n_train, 1, n - 1);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  SplitDataset split;
  split.seed = seed;
  split.train.X.resize(n_train, m);
  split.train.y.resize(n_train);
  split.test.X.resize(n - n_train, m);
  split.test.y.resize(n - n_train);
  for (int i = 0; i < n_train; ++i) {
    split.train.X.row(i) = raw.X.row(order[i]);
    split.train.y[i] = raw.y[order[i]];
  }
  for (int i = n_train; i < n; ++i) {
    split.test.X.row(i - n_train) = raw.X.row(order[i]);
    split.test.y[i - n_train] = raw.y[order[i]];
  }

  bool pos = false, neg = false;
  for (int i = 0; i < n_train; ++i) (split.train.y[i] > 0 ? pos : neg) = true;
  if (!pos || !neg)
    throw InputError("train split contains a single class; rerun with a "
                     "different seed");

  split.mean = split.train.X.colwise().mean();
  split.std.resize(m);
  for (int c = 0; c < m; ++c) {
    double var =
        (split.train.X.col(c).array() - split.mean[c]).square().mean();
    double sd = std::sqrt(var);
    if (sd < 1e-12) {
      // Constant column: leave untouched.
      split.mean[c] = 0.0;
      split.std[c] = 1.0;
    } else {
      split.std[c] = sd;
    }
  }
  for (int c = 0; c < m; ++c) {
    split.train.X.col(c) =
        (split.train.X.col(c).array() - split.mean[c]) / split.std[c];
    split.test.X.col(c) =
        (split.test.X.col(c).array() - split.mean[c]) / split.std[c];
  }
  return split;
}

}  // namespace smkl
