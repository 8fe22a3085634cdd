#include "ssnmf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ssnmf {

std::vector<Bicluster> extract_biclusters(const Matrix& w, const Matrix& h,
                                          double threshold,
                                          std::ostream* warnings) {
  if (w.cols() != h.rows())
    throw std::invalid_argument("extract_biclusters: W columns != H rows");
  if (w.rows() == 0 || h.cols() == 0)
    throw std::invalid_argument("extract_biclusters: empty factors");

  const Index p = w.rows();
  const Index r = w.cols();
  std::vector<Bicluster> out(static_cast<std::size_t>(r));

  for (Index i = 0; i < r; ++i) {
    Bicluster& bc = out[static_cast<std::size_t>(i)];
    bc.factor_index = i;
    bc.threshold = threshold;
    const double mean = w.col(i).mean();
    const double sd = std::sqrt((w.col(i).array() - mean).square().sum() /
                                static_cast<double>(p));
    if (sd == 0.0) {
      if (warnings)
        *warnings << "extract_biclusters: W column " << i
                  << " is constant, feature set left empty\n";
      continue;
    }
    for (Index row = 0; row < p; ++row)
      if ((w(row, i) - mean) / sd > threshold) bc.feature_indices.push_back(row);
  }

  // Samples go to every factor attaining their column maximum, so ties place
  // a sample in several biclusters.
  for (Index j = 0; j < h.cols(); ++j) {
    const double top = h.col(j).maxCoeff();
    for (Index i = 0; i < r; ++i)
      if (h(i, j) == top)
        out[static_cast<std::size_t>(i)].sample_indices.push_back(j);
  }
  return out;
}

std::vector<Index> detect_outliers(const Matrix& h, Index m) {
  if (h.rows() == 0 || h.cols() == 0)
    throw std::invalid_argument("detect_outliers: H is empty");
  if (m < 0 || m > h.cols())
    throw std::invalid_argument("detect_outliers: m out of range");

  const RowVector maxima = h.colwise().maxCoeff();
  std::vector<Index> order(static_cast<std::size_t>(h.cols()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&maxima](Index a, Index b) { return maxima(a) < maxima(b); });
  order.resize(static_cast<std::size_t>(m));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace ssnmf
