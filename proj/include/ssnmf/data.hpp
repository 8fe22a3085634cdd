#ifndef SSNMF_DATA_HPP
#define SSNMF_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ssnmf/metrics.hpp"
#include "ssnmf/types.hpp"

namespace ssnmf {

// Expression matrix with rows = features and columns = samples. truth is
// empty when no ground-truth labels exist; name vectors are empty or match
// the corresponding dimension.
struct LabeledDataset {
  Matrix x;
  LabelVector truth;
  std::vector<std::string> feature_names;
  std::vector<std::string> sample_names;
};

// 500 x 60 matrix with three N(0,1) blocks on the diagonal band (rows 1-60 x
// cols 1-20, rows 31-90 x cols 21-40, rows 61-120 x cols 41-60, 1-based),
// 0.9 * N(0,1) everywhere else, then entrywise absolute value. Truth splits
// the samples 20/20/20.
LabeledDataset synthetic_three_block(std::uint32_t seed);

// Same construction minus the third block: columns 41-60 carry no signal and
// are labeled as outlier class 2.
LabeledDataset synthetic_outlier(std::uint32_t seed);

enum class MatrixFormat { kCsv, kTsv, kMatrixMarket };

// Picks the format from the file extension: .tsv / .mtx / anything else CSV.
MatrixFormat format_from_path(const std::string& path);

// Reads a nonnegative matrix. CSV/TSV may carry an optional header row of
// sample names and an optional first column of feature names; both are
// auto-detected. MatrixMarket coordinate files expand densely with zeros.
// Truth labels are not read here; see load_labels.
LabeledDataset load_matrix(const std::string& path, MatrixFormat format);

inline LabeledDataset load_matrix(const std::string& path) {
  return load_matrix(path, format_from_path(path));
}

// CSV with 17 significant digits so values round-trip exactly. Names are
// written only when provided.
void save_matrix(const std::string& path, const Matrix& m,
                 const std::vector<std::string>& feature_names = {},
                 const std::vector<std::string>& sample_names = {});

// One label per line, in sample order. Integer labels are taken as-is;
// anything else is mapped to ids by order of first appearance.
LabelVector load_labels(const std::string& path);
void save_labels(const std::string& path, const LabelVector& labels);

// Drops features whose zero count exceeds dropout_fraction * n, then applies
// x <- log2(1 + x) to what remains. Errors when nothing survives.
LabeledDataset preprocess_scrna(const LabeledDataset& ds,
                                double dropout_fraction = 0.7);

}  // namespace ssnmf

#endif
