#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ssnmf/data.hpp"

using ssnmf::LabeledDataset;
using ssnmf::Matrix;
using ssnmf::MatrixFormat;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string write_file(const std::string& name, const std::string& content) {
  const auto path = temp_file(name);
  std::ofstream out(path);
  out << content;
  return path.string();
}

bool exactly_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("synthetic_three_block has the documented shape and labels") {
  const auto ds = ssnmf::synthetic_three_block(0);
  CHECK(ds.x.rows() == 500);
  CHECK(ds.x.cols() == 60);
  CHECK((ds.x.array() >= 0.0).all());
  REQUIRE(ds.truth.size() == 60);
  for (std::size_t j = 0; j < 60; ++j)
    CHECK(ds.truth[j] == static_cast<int>(j / 20));
}

TEST_CASE("synthetic data is seed-deterministic") {
  const auto a = ssnmf::synthetic_three_block(42);
  const auto b = ssnmf::synthetic_three_block(42);
  const auto c = ssnmf::synthetic_three_block(43);
  CHECK(exactly_equal(a.x, b.x));
  CHECK_FALSE(exactly_equal(a.x, c.x));
}

TEST_CASE("signal blocks are brighter than the background") {
  const auto ds = ssnmf::synthetic_three_block(7);
  const double block_mean = (ds.x.block(0, 0, 60, 20).sum() +
                             ds.x.block(30, 20, 60, 20).sum() +
                             ds.x.block(60, 40, 60, 20).sum()) /
                            (3.0 * 60.0 * 20.0);
  const double total = ds.x.sum();
  const double background_mean =
      (total - block_mean * 3.0 * 60.0 * 20.0) / (500.0 * 60.0 - 3600.0);
  // |N(0,1)| has mean ~0.798 in the blocks versus 0.9 * that outside.
  CHECK(block_mean > background_mean);
}

TEST_CASE("outlier variant only dims the third block") {
  const auto full = ssnmf::synthetic_three_block(11);
  const auto outlier = ssnmf::synthetic_outlier(11);
  CHECK(outlier.x.rows() == 500);
  CHECK(outlier.x.cols() == 60);
  REQUIRE(outlier.truth.size() == 60);
  for (std::size_t j = 40; j < 60; ++j) CHECK(outlier.truth[j] == 2);

  // Same seed, same draws: the variants agree except where the third block
  // falls back to the 0.9 background scale.
  Matrix expected = full.x;
  expected.block(60, 40, 60, 20) *= 0.9;
  CHECK(exactly_equal(outlier.x, expected));
}

TEST_CASE("csv with header and feature names parses per the documented layout") {
  const auto path = write_file("ssnmf_basic.csv", "a,s1,s2\ng1,1,2\ng2,3,4\n");
  const LabeledDataset ds = ssnmf::load_matrix(path);
  REQUIRE(ds.x.rows() == 2);
  REQUIRE(ds.x.cols() == 2);
  CHECK(ds.x(0, 0) == 1.0);
  CHECK(ds.x(0, 1) == 2.0);
  CHECK(ds.x(1, 0) == 3.0);
  CHECK(ds.x(1, 1) == 4.0);
  CHECK(ds.feature_names == std::vector<std::string>{"g1", "g2"});
  CHECK(ds.sample_names == std::vector<std::string>{"s1", "s2"});
  CHECK(ds.truth.empty());
}

TEST_CASE("csv shape detection covers the name-less layouts") {
  const auto bare = ssnmf::load_matrix(
      write_file("ssnmf_bare.csv", "1,2\n3,4\n"));
  CHECK(bare.x.rows() == 2);
  CHECK(bare.feature_names.empty());
  CHECK(bare.sample_names.empty());

  const auto features_only = ssnmf::load_matrix(
      write_file("ssnmf_feat.csv", "g1,1,2\ng2,3,4\n"));
  CHECK(features_only.feature_names == std::vector<std::string>{"g1", "g2"});
  CHECK(features_only.sample_names.empty());
  CHECK(features_only.x(1, 1) == 4.0);

  // Header without a corner cell above the feature names.
  const auto no_corner = ssnmf::load_matrix(
      write_file("ssnmf_nocorner.csv", "s1,s2\ng1,1,2\ng2,3,4\n"));
  CHECK(no_corner.sample_names == std::vector<std::string>{"s1", "s2"});
  CHECK(no_corner.feature_names == std::vector<std::string>{"g1", "g2"});
  CHECK(no_corner.x(0, 1) == 2.0);

  const auto header_only = ssnmf::load_matrix(
      write_file("ssnmf_header.csv", "s1,s2\n1,2\n3,4\n"));
  CHECK(header_only.sample_names == std::vector<std::string>{"s1", "s2"});
  CHECK(header_only.feature_names.empty());
  CHECK(header_only.x(1, 0) == 3.0);
}

TEST_CASE("loader rejects malformed and negative input") {
  CHECK_THROWS_WITH_AS(
      ssnmf::load_matrix(write_file("ssnmf_neg.csv", "1,-2\n3,4\n")),
      doctest::Contains("negative value at row 1, column 2"),
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      ssnmf::load_matrix(write_file("ssnmf_ragged.csv", "1,2\n3,4,5\n")),
      doctest::Contains("inconsistent field count"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      ssnmf::load_matrix(write_file("ssnmf_junk.csv", "1,x\n3,4\n")),
      doctest::Contains("cannot parse"), std::runtime_error);
  CHECK_THROWS_AS(ssnmf::load_matrix(write_file("ssnmf_empty.csv", "\n\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(ssnmf::load_matrix(
                      write_file("ssnmf_nan.csv", "1,nan\n3,4\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(ssnmf::load_matrix("/nonexistent/ssnmf.csv"),
                  std::runtime_error);
}

TEST_CASE("save_matrix round-trips values exactly") {
  Matrix m(3, 2);
  m << 0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, 0.0, 7.25;
  const auto path = temp_file("ssnmf_roundtrip.csv").string();
  ssnmf::save_matrix(path, m, {"f1", "f2", "f3"}, {"c1", "c2"});
  const auto ds = ssnmf::load_matrix(path);
  CHECK(exactly_equal(ds.x, m));
  CHECK(ds.feature_names == std::vector<std::string>{"f1", "f2", "f3"});
  CHECK(ds.sample_names == std::vector<std::string>{"c1", "c2"});

  const auto bare_path = temp_file("ssnmf_roundtrip_bare.csv").string();
  ssnmf::save_matrix(bare_path, m);
  CHECK(exactly_equal(ssnmf::load_matrix(bare_path).x, m));

  CHECK_THROWS_AS(ssnmf::save_matrix(path, m, {"only_one"}, {}),
                  std::invalid_argument);
}

TEST_CASE("tsv uses tabs and matrix market expands coordinates") {
  const auto tsv = ssnmf::load_matrix(
      write_file("ssnmf_tab.tsv", "g1\t1\t2\ng2\t3\t4\n"));
  CHECK(tsv.feature_names == std::vector<std::string>{"g1", "g2"});
  CHECK(tsv.x(0, 1) == 2.0);
  CHECK(ssnmf::format_from_path("x.tsv") == MatrixFormat::kTsv);
  CHECK(ssnmf::format_from_path("x.mtx") == MatrixFormat::kMatrixMarket);
  CHECK(ssnmf::format_from_path("x.csv") == MatrixFormat::kCsv);
  CHECK(ssnmf::format_from_path("noext") == MatrixFormat::kCsv);

  const auto mtx = ssnmf::load_matrix(write_file(
      "ssnmf_coord.mtx",
      "%%MatrixMarket matrix coordinate real general\n% comment\n3 2 3\n"
      "1 1 5.5\n3 2 1.25\n2 1 4\n"));
  REQUIRE(mtx.x.rows() == 3);
  REQUIRE(mtx.x.cols() == 2);
  CHECK(mtx.x(0, 0) == 5.5);
  CHECK(mtx.x(2, 1) == 1.25);
  CHECK(mtx.x(1, 0) == 4.0);
  CHECK(mtx.x(0, 1) == 0.0);

  CHECK_THROWS_AS(ssnmf::load_matrix(write_file(
                      "ssnmf_badbanner.mtx",
                      "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(ssnmf::load_matrix(write_file(
                      "ssnmf_badcount.mtx",
                      "%%MatrixMarket matrix coordinate real general\n2 2 3\n"
                      "1 1 1\n2 2 1\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(ssnmf::load_matrix(write_file(
                      "ssnmf_oob.mtx",
                      "%%MatrixMarket matrix coordinate real general\n2 2 1\n"
                      "3 1 1\n")),
                  std::runtime_error);
}

TEST_CASE("labels load as integers or first-appearance ids") {
  const auto ints = ssnmf::load_labels(
      write_file("ssnmf_int_labels.csv", "3\n1\n3\n2\n"));
  CHECK(ints == ssnmf::LabelVector{3, 1, 3, 2});

  const auto names = ssnmf::load_labels(
      write_file("ssnmf_str_labels.csv", "tcell\nbcell\ntcell\nnk\n"));
  CHECK(names == ssnmf::LabelVector{0, 1, 0, 2});

  const auto path = temp_file("ssnmf_labels_out.csv").string();
  ssnmf::save_labels(path, {4, 0, 4});
  CHECK(ssnmf::load_labels(path) == ssnmf::LabelVector{4, 0, 4});

  CHECK_THROWS_AS(ssnmf::load_labels(write_file("ssnmf_nolabels.csv", "\n")),
                  std::runtime_error);
}

TEST_CASE("preprocess_scrna drops features strictly above the dropout limit") {
  LabeledDataset ds;
  ds.x = Matrix::Zero(3, 100);
  ds.x.row(0).setConstant(1.0);               // 0 zeros
  ds.x.row(1).leftCols(30).setConstant(2.0);  // 70 zeros: exactly at the limit
  ds.x.row(2).leftCols(29).setConstant(3.0);  // 71 zeros: over the limit
  ds.feature_names = {"keep_all", "keep_edge", "drop"};
  ds.truth.assign(100, 1);

  const auto out = ssnmf::preprocess_scrna(ds, 0.7);
  REQUIRE(out.x.rows() == 2);
  CHECK(out.x.cols() == 100);
  CHECK(out.feature_names == std::vector<std::string>{"keep_all", "keep_edge"});
  CHECK(out.truth == ds.truth);
  CHECK(out.x(0, 0) == doctest::Approx(1.0).epsilon(1e-15));  // log2(1 + 1)
  CHECK(out.x(1, 0) == doctest::Approx(std::log2(3.0)).epsilon(1e-15));
  CHECK(out.x(1, 99) == 0.0);  // log2(1 + 0)

  LabeledDataset all_sparse;
  all_sparse.x = Matrix::Zero(2, 10);
  all_sparse.x(0, 0) = 1.0;
  CHECK_THROWS_AS(ssnmf::preprocess_scrna(all_sparse, 0.5), std::runtime_error);

  LabeledDataset negative;
  negative.x = Matrix::Constant(2, 2, -1.0);
  CHECK_THROWS_AS(ssnmf::preprocess_scrna(negative, 0.5),
                  std::invalid_argument);
}
