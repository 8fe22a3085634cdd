#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ssnmf/analysis.hpp"

using ssnmf::Bicluster;
using ssnmf::Index;
using ssnmf::Matrix;

namespace {

// Population z-scores computed with plain loops.
std::vector<Index> zscore_features(const Matrix& w, Index col, double t) {
  double mean = 0.0;
  for (Index i = 0; i < w.rows(); ++i) mean += w(i, col);
  mean /= static_cast<double>(w.rows());
  double var = 0.0;
  for (Index i = 0; i < w.rows(); ++i)
    var += (w(i, col) - mean) * (w(i, col) - mean);
  const double sd = std::sqrt(var / static_cast<double>(w.rows()));
  std::vector<Index> picked;
  for (Index i = 0; i < w.rows(); ++i)
    if ((w(i, col) - mean) / sd > t) picked.push_back(i);
  return picked;
}

}  // namespace

TEST_CASE("a single spike passes the z-score threshold") {
  Matrix w = Matrix::Zero(10, 1);
  w(0, 0) = 10.0;  // mean 1, sd 3, z = 3 for the spike and -1/3 elsewhere
  const Matrix h = Matrix::Constant(1, 4, 1.0);
  const auto biclusters = ssnmf::extract_biclusters(w, h, 1.5);
  REQUIRE(biclusters.size() == 1);
  CHECK(biclusters[0].factor_index == 0);
  CHECK(biclusters[0].threshold == 1.5);
  CHECK(biclusters[0].feature_indices == std::vector<Index>{0});
  CHECK(biclusters[0].sample_indices == std::vector<Index>{0, 1, 2, 3});
}

TEST_CASE("identity H assigns sample j to bicluster j only") {
  const Matrix w = Matrix::Random(8, 3).array().abs();
  const Matrix h = Matrix::Identity(3, 3);
  const auto biclusters = ssnmf::extract_biclusters(w, h, 0.5);
  REQUIRE(biclusters.size() == 3);
  for (Index i = 0; i < 3; ++i)
    CHECK(biclusters[static_cast<std::size_t>(i)].sample_indices ==
          std::vector<Index>{i});
}

TEST_CASE("feature sets match a scalar z-score oracle") {
  Matrix w(6, 2);
  w << 0.1, 3.0, 2.5, 0.2, 0.3, 2.9, 2.6, 0.1, 0.2, 0.4, 0.1, 2.8;
  const Matrix h = Matrix::Constant(2, 5, 1.0);
  for (double t : {-1.0, 0.0, 0.5, 1.0}) {
    const auto biclusters = ssnmf::extract_biclusters(w, h, t);
    for (Index col = 0; col < 2; ++col)
      CHECK(biclusters[static_cast<std::size_t>(col)].feature_indices ==
            zscore_features(w, col, t));
  }
}

TEST_CASE("infinite threshold empties every feature set") {
  const Matrix w = Matrix::Random(7, 2).array().abs();
  const Matrix h = Matrix::Random(2, 5).array().abs();
  const auto biclusters = ssnmf::extract_biclusters(
      w, h, std::numeric_limits<double>::infinity());
  for (const auto& bc : biclusters) CHECK(bc.feature_indices.empty());
}

TEST_CASE("constant W column warns and leaves its feature set empty") {
  Matrix w(5, 2);
  w.col(0).setConstant(2.0);
  w.col(1) << 0.0, 1.0, 0.0, 5.0, 0.0;
  const Matrix h = Matrix::Identity(2, 2);
  std::ostringstream warnings;
  const auto biclusters = ssnmf::extract_biclusters(w, h, 1.0, &warnings);
  CHECK(biclusters[0].feature_indices.empty());
  CHECK_FALSE(biclusters[1].feature_indices.empty());
  CHECK(warnings.str().find("column 0") != std::string::npos);

  // Without a sink the degenerate column is silently skipped.
  CHECK_NOTHROW(ssnmf::extract_biclusters(w, h, 1.0));
}

TEST_CASE("tied column maxima place a sample in every tied bicluster") {
  const Matrix w = Matrix::Random(4, 2).array().abs();
  Matrix h(2, 3);
  h << 0.7, 0.2, 0.5,
       0.7, 0.9, 0.1;
  const auto biclusters = ssnmf::extract_biclusters(w, h, 10.0);
  CHECK(biclusters[0].sample_indices == std::vector<Index>{0, 2});
  CHECK(biclusters[1].sample_indices == std::vector<Index>{0, 1});

  // Every sample lands somewhere.
  std::vector<bool> covered(3, false);
  for (const auto& bc : biclusters)
    for (Index j : bc.sample_indices) covered[static_cast<std::size_t>(j)] = true;
  CHECK(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }));
}

TEST_CASE("bicluster sets are invariant under the documented rescalings") {
  Matrix w = Matrix::Random(9, 3).array().abs() + 0.01;
  // One nonzero per column, the structure the orthogonality penalty drives
  // H toward; row rescaling then cannot move any column argmax.
  Matrix h = Matrix::Zero(3, 6);
  for (Index j = 0; j < h.cols(); ++j) h(j % 3, j) = 0.5 + 0.1 * double(j);
  const auto base = ssnmf::extract_biclusters(w, h, 0.8);

  Matrix w_scaled = w;
  w_scaled.col(1) *= 5.0;
  const auto feature_scaled = ssnmf::extract_biclusters(w_scaled, h, 0.8);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(feature_scaled[i].feature_indices == base[i].feature_indices);

  Matrix h_scaled = h;
  h_scaled.row(1) /= 5.0;
  const auto pair_scaled = ssnmf::extract_biclusters(w_scaled, h_scaled, 0.8);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(pair_scaled[i].sample_indices == base[i].sample_indices);
}

TEST_CASE("extract_biclusters validates shapes") {
  CHECK_THROWS_AS(
      ssnmf::extract_biclusters(Matrix::Zero(4, 2), Matrix::Zero(3, 5), 1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(ssnmf::extract_biclusters(Matrix(), Matrix(), 1.0),
                  std::invalid_argument);
}

TEST_CASE("detect_outliers returns the m weakest columns in index order") {
  Matrix h(2, 5);
  h << 0.9, 0.0, 0.4, 0.8, 0.1,
       0.5, 0.0, 0.3, 0.2, 0.15;
  CHECK(ssnmf::detect_outliers(h, 1) == std::vector<Index>{1});
  CHECK(ssnmf::detect_outliers(h, 2) == std::vector<Index>{1, 4});
  CHECK(ssnmf::detect_outliers(h, 3) == std::vector<Index>{1, 2, 4});
  CHECK(ssnmf::detect_outliers(h, 5) == std::vector<Index>{0, 1, 2, 3, 4});
  CHECK(ssnmf::detect_outliers(h, 0).empty());

  // Row order contributes nothing beyond the column maxima.
  Matrix flipped = h.colwise().reverse();
  CHECK(ssnmf::detect_outliers(flipped, 3) == ssnmf::detect_outliers(h, 3));

  CHECK_THROWS_AS(ssnmf::detect_outliers(h, 6), std::invalid_argument);
  CHECK_THROWS_AS(ssnmf::detect_outliers(h, -1), std::invalid_argument);
  CHECK_THROWS_AS(ssnmf::detect_outliers(Matrix(), 0), std::invalid_argument);
}
