#ifndef SSNMF_ANALYSIS_HPP
#define SSNMF_ANALYSIS_HPP

#include <iosfwd>
#include <vector>

#include "ssnmf/types.hpp"

namespace ssnmf {

struct Bicluster {
  Index factor_index = 0;
  std::vector<Index> feature_indices;
  std::vector<Index> sample_indices;
  double threshold = 0.0;
};

// One bicluster per factor. Features of factor i are the rows whose z-score
// within column i of W exceeds T (population standard deviation); samples are
// the columns of H whose maximum sits in row i, ties included, so a sample
// with tied maxima belongs to several biclusters. A constant W column has no
// z-scores; its feature set stays empty and a note goes to `warnings` when
// given.
std::vector<Bicluster> extract_biclusters(const Matrix& w, const Matrix& h,
                                          double threshold,
                                          std::ostream* warnings = nullptr);

// The m samples whose columns of H have the smallest maxima, i.e. weak
// membership in every cluster. Returned in ascending index order.
std::vector<Index> detect_outliers(const Matrix& h, Index m);

}  // namespace ssnmf

#endif
