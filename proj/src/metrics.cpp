#include "ssnmf/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace ssnmf {

namespace {

std::map<int, int> dense_ids(const LabelVector& labels) {
  std::map<int, int> ids;
  for (int label : labels) ids.emplace(label, 0);
  int next = 0;
  for (auto& [label, id] : ids) {
    (void)label;
    id = next++;
  }
  return ids;
}

// True when the two labelings induce the same partition of samples: exactly
// one nonzero per row and per column of the contingency table.
bool same_partition(const ContingencyTable& tab) {
  for (Index l = 0; l < tab.counts.rows(); ++l)
    if ((tab.counts.row(l).array() != 0).count() != 1) return false;
  for (Index h = 0; h < tab.counts.cols(); ++h)
    if ((tab.counts.col(h).array() != 0).count() != 1) return false;
  return true;
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

ContingencyTable contingency(const LabelVector& pred, const LabelVector& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("contingency: label vectors differ in length");
  const auto pred_ids = dense_ids(pred);
  const auto truth_ids = dense_ids(truth);
  ContingencyTable tab;
  tab.counts = Eigen::MatrixX<long>::Zero(
      static_cast<Index>(pred_ids.size()), static_cast<Index>(truth_ids.size()));
  for (std::size_t s = 0; s < pred.size(); ++s)
    ++tab.counts(pred_ids.at(pred[s]), truth_ids.at(truth[s]));
  tab.pred_sizes = tab.counts.rowwise().sum();
  tab.truth_sizes = tab.counts.colwise().sum();
  tab.total = static_cast<long>(pred.size());
  return tab;
}

LabelVector assign_clusters(const Matrix& h) {
  if (h.rows() == 0 || h.cols() == 0)
    throw std::invalid_argument("assign_clusters: H is empty");
  LabelVector labels(static_cast<std::size_t>(h.cols()));
  for (Index j = 0; j < h.cols(); ++j) {
    Index best = 0;
    for (Index i = 1; i < h.rows(); ++i)
      if (h(i, j) > h(best, j)) best = i;
    labels[static_cast<std::size_t>(j)] = static_cast<int>(best);
  }
  return labels;
}

double nmi(const LabelVector& pred, const LabelVector& truth) {
  const ContingencyTable tab = contingency(pred, truth);
  if (tab.total < 1) throw std::invalid_argument("nmi: empty labelings");
  const double n = static_cast<double>(tab.total);

  // Count form of mutual information and marginal entropies; the common 1/n
  // factor cancels in the ratio.
  double mutual = 0.0;
  for (Index l = 0; l < tab.counts.rows(); ++l)
    for (Index h = 0; h < tab.counts.cols(); ++h) {
      const double t = static_cast<double>(tab.counts(l, h));
      if (t > 0.0)
        mutual += t * std::log(n * t /
                               (static_cast<double>(tab.pred_sizes(l)) *
                                static_cast<double>(tab.truth_sizes(h))));
    }
  double entropy_pred = 0.0;
  for (Index l = 0; l < tab.pred_sizes.size(); ++l) {
    const double t = static_cast<double>(tab.pred_sizes(l));
    if (t > 0.0) entropy_pred += t * std::log(n / t);
  }
  double entropy_truth = 0.0;
  for (Index h = 0; h < tab.truth_sizes.size(); ++h) {
    const double t = static_cast<double>(tab.truth_sizes(h));
    if (t > 0.0) entropy_truth += t * std::log(n / t);
  }

  if (entropy_pred == 0.0 || entropy_truth == 0.0)
    return same_partition(tab) ? 1.0 : 0.0;
  return clamp01(mutual / std::sqrt(entropy_pred * entropy_truth));
}

double purity(const LabelVector& pred, const LabelVector& truth) {
  const ContingencyTable tab = contingency(pred, truth);
  if (tab.total < 1) throw std::invalid_argument("purity: empty labelings");
  long hits = 0;
  for (Index l = 0; l < tab.counts.rows(); ++l)
    hits += tab.counts.row(l).maxCoeff();
  return static_cast<double>(hits) / static_cast<double>(tab.total);
}

double entropy_metric(const LabelVector& pred, const LabelVector& truth) {
  const ContingencyTable tab = contingency(pred, truth);
  if (tab.total < 1)
    throw std::invalid_argument("entropy_metric: empty labelings");
  const Index d = tab.counts.cols();
  if (d < 2)
    throw std::invalid_argument("entropy_metric: need at least 2 truth classes");
  double sum = 0.0;
  for (Index l = 0; l < tab.counts.rows(); ++l)
    for (Index h = 0; h < d; ++h) {
      const double t = static_cast<double>(tab.counts(l, h));
      if (t > 0.0)
        sum += t * std::log2(t / static_cast<double>(tab.pred_sizes(l)));
    }
  return -sum / (static_cast<double>(tab.total) *
                 std::log2(static_cast<double>(d)));
}

double orthogonality_score(const Matrix& h) {
  if (h.rows() == 0 || h.cols() == 0)
    throw std::invalid_argument("orthogonality_score: H is empty");
  std::vector<Index> keep;
  for (Index i = 0; i < h.rows(); ++i)
    if (h.row(i).squaredNorm() > 0.0) keep.push_back(i);
  if (keep.empty()) return 0.0;  // nothing left to be non-orthogonal

  const Index r = static_cast<Index>(keep.size());
  Matrix normalized(r, h.cols());
  for (Index t = 0; t < r; ++t)
    normalized.row(t) = h.row(keep[static_cast<std::size_t>(t)]).normalized();
  return (normalized * normalized.transpose() - Matrix::Identity(r, r)).norm();
}

}  // namespace ssnmf
