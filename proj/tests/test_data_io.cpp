#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "smkl/data_io.hpp"

using namespace smkl;

TEST_SUITE_BEGIN("data_io");

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("/tmp/smkl_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

DataSchema toy_schema() {
  return DataSchema::from_json(
      R"({"label": "class", "positive": "yes", "categorical": ["color"]})");
}

const char* kToyCsv =
    "size,color,class\n"
    "1.0,red,yes\n"
    "2.0,green,no\n"
    "3.0,blue,yes\n"
    "4.0,red,no\n"
    "5.5,green,yes\n";

}  // namespace

TEST_CASE("schema parsing and validation") {
  DataSchema s = toy_schema();
  CHECK(s.label_column == "class");
  CHECK(s.positive_value == "yes");
  REQUIRE(s.categorical_columns.size() == 1);
  CHECK(s.delimiter == ',');
  DataSchema semi = DataSchema::from_json(
      R"({"label": "c", "positive": "1", "delimiter": ";"})");
  CHECK(semi.delimiter == ';');
  CHECK_THROWS_AS(DataSchema::from_json(R"({"positive": "1"})"), InputError);
  CHECK_THROWS_AS(DataSchema::from_json("not json"), InputError);
}

TEST_CASE("categorical one-hot drops the first level") {
  std::string path = write_temp("toy.csv", kToyCsv);
  RawDataset raw = load_csv(path, toy_schema());
  // Levels sorted: blue (omitted), green, red -> 1 numeric + 2 one-hot.
  REQUIRE(raw.feature_names.size() == 3);
  CHECK(raw.feature_names[0] == "size");
  CHECK(raw.feature_names[1] == "color=green");
  CHECK(raw.feature_names[2] == "color=red");
  REQUIRE(raw.X.rows() == 5);
  CHECK(raw.X(0, 1) == 0.0);  // red -> (0, 1)
  CHECK(raw.X(0, 2) == 1.0);
  CHECK(raw.X(1, 1) == 1.0);  // green -> (1, 0)
  CHECK(raw.X(2, 1) == 0.0);  // blue -> (0, 0)
  CHECK(raw.X(2, 2) == 0.0);
  // Labels: yes -> +1, anything else -> -1.
  CHECK(raw.y[0] == 1.0);
  CHECK(raw.y[1] == -1.0);
  CHECK(raw.dropped_rows == 0);
}

TEST_CASE("rows with missing cells are dropped with a warning") {
  std::string path = write_temp("missing.csv",
                                "a,b,class\n"
                                "1.0,2.0,yes\n"
                                "2.0,,no\n"
                                "3.0,4.0,no\n");
  DataSchema s = DataSchema::from_json(R"({"label": "class", "positive": "yes"})");
  RawDataset raw = load_csv(path, s);
  CHECK(raw.X.rows() == 2);
  CHECK(raw.dropped_rows == 1);
  REQUIRE(raw.warnings.size() == 1);
  CHECK(raw.warnings[0].find("row 3") != std::string::npos);
}

TEST_CASE("malformed inputs raise structured errors") {
  DataSchema s = DataSchema::from_json(R"({"label": "class", "positive": "yes"})");
  CHECK_THROWS_AS(load_csv("/tmp/smkl_no_such_file.csv", s), InputError);
  std::string bad_label = write_temp("bad_label.csv", kToyCsv);
  DataSchema wrong = s;
  wrong.label_column = "target";
  CHECK_THROWS_AS(load_csv(bad_label, wrong), InputError);
  std::string bad_cell = write_temp("bad_cell.csv",
                                    "a,class\nx1,yes\n2.0,no\n");
  CHECK_THROWS_AS(load_csv(bad_cell, s), InputError);
  std::string one_class = write_temp("one_class.csv",
                                     "a,class\n1.0,no\n2.0,no\n");
  CHECK_THROWS_AS(load_csv(one_class, s), InputError);
}

TEST_CASE("split is an 80/20 partition with train-only standardization") {
  // 50 rows, two informative columns plus one constant column.
  std::string csv = "f1,f2,konst,class\n";
  for (int i = 0; i < 50; ++i) {
    double v = 0.1 * i - 2.0;
    csv += std::to_string(v) + "," + std::to_string(v * v) + ",7.5," +
           (i % 2 == 0 ? "yes" : "no") + "\n";
  }
  std::string path = write_temp("split.csv", csv);
  DataSchema s = DataSchema::from_json(R"({"label": "class", "positive": "yes"})");
  RawDataset raw = load_csv(path, s);
  SplitDataset split = split_standardize(raw, 11);
  CHECK(split.train.n() == 40);
  CHECK(split.test.n() == 10);
  // Train columns standardized (biased variance).
  for (int c = 0; c < 2; ++c) {
    CHECK(split.train.X.col(c).mean() == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    double var = split.train.X.col(c).array().square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-10));
  }
  // Constant column passes through unscaled.
  CHECK(split.mean[2] == 0.0);
  CHECK(split.std[2] == 1.0);
  CHECK(split.train.X(0, 2) == 7.5);

  // Determinism: same seed, same partition; different seed, different one.
  SplitDataset again = split_standardize(raw, 11);
  CHECK((split.train.X - again.train.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((split.train.y - again.train.y).cwiseAbs().maxCoeff() == 0.0);
  SplitDataset other = split_standardize(raw, 12);
  CHECK((split.train.y - other.train.y).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("split rejects fractions outside (0, 1)") {
  RawDataset raw;
  raw.X = Eigen::MatrixXd::Random(10, 2);
  raw.y = Eigen::VectorXd::Ones(10);
  for (int i = 0; i < 5; ++i) raw.y[i] = -1.0;
  CHECK_THROWS_AS(split_standardize(raw, 0, 0.0), InputError);
  CHECK_THROWS_AS(split_standardize(raw, 0, 1.0), InputError);
}

TEST_SUITE_END();
