#ifndef SSNMF_METRICS_HPP
#define SSNMF_METRICS_HPP

#include <vector>

#include "ssnmf/types.hpp"

namespace ssnmf {

using LabelVector = std::vector<int>;

// Overlap counts between two labelings of the same samples. Cluster ids are
// remapped to dense 0-based indices in sorted id order; every metric below is
// invariant under that remapping.
struct ContingencyTable {
  Eigen::MatrixX<long> counts;       // c x d, counts(l, h) = |pred l ∩ truth h|
  Eigen::VectorX<long> pred_sizes;   // row sums, length c
  Eigen::VectorX<long> truth_sizes;  // column sums, length d
  long total = 0;
};

ContingencyTable contingency(const LabelVector& pred, const LabelVector& truth);

// Label of sample j is the argmax over rows of column j; ties take the lowest
// row index, so an all-zero column gets label 0.
LabelVector assign_clusters(const Matrix& h);

// Normalized mutual information in [0, 1]. Degenerate marginals (either
// labeling has a single cluster) give 0, except when both partitions are
// identical as set partitions, which gives 1.
double nmi(const LabelVector& pred, const LabelVector& truth);

// Fraction of samples in the majority truth class of their predicted cluster.
double purity(const LabelVector& pred, const LabelVector& truth);

// Average truth-class entropy within predicted clusters, normalized by
// log2(d) to land in [0, 1]; 0 exactly for pure clusters. Requires d >= 2.
double entropy_metric(const LabelVector& pred, const LabelVector& truth);

// Frobenius distance between the row-normalized Gram matrix of H and the
// identity; zero rows are dropped before normalizing. 0 iff the surviving
// rows are mutually orthogonal.
double orthogonality_score(const Matrix& h);

}  // namespace ssnmf

#endif
