#ifndef SSNMF_PROX_HPP
#define SSNMF_PROX_HPP

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ssnmf/types.hpp"

namespace ssnmf {

// Indices retained by a sparse projection, ordered by decreasing selection
// key; ties broken towards the lower index. Deterministic by construction.
struct SupportSet {
  std::vector<Index> indices;
};

template <typename Derived>
DenseMatrix<typename Derived::Scalar> project_nonneg(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m.cwiseMax(Scalar(0));
}

// Rows with the k largest Euclidean norms. Selection compares squared norms,
// which orders identically.
template <typename Derived>
SupportSet support_norm(const Eigen::MatrixBase<Derived>& m, Index k) {
  if (k < 0) throw std::invalid_argument("support_norm: k must be >= 0");
  const auto norms = m.derived().rowwise().squaredNorm().eval();
  std::vector<Index> order(static_cast<std::size_t>(m.rows()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&norms](Index a, Index b) { return norms(a) > norms(b); });
  order.resize(static_cast<std::size_t>(std::min<Index>(k, m.rows())));
  return SupportSet{std::move(order)};
}

// Keeps the k rows of largest norm, zeroes the rest. No sign change: this is
// the projection onto the row-sparsity set alone.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> row_sparse_project(
    const Eigen::MatrixBase<Derived>& m, Index k) {
  using Scalar = typename Derived::Scalar;
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(m.rows(), m.cols());
  for (Index i : support_norm(m, k).indices) out.row(i) = m.derived().row(i);
  return out;
}

// Joint projection onto { A >= 0, at most k nonzero rows }: clamp first, then
// select rows by the clamped norms. The composition is exact because clamping
// is entrywise and row selection never changes surviving entries.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> prox_row_sparse_nonneg(
    const Eigen::MatrixBase<Derived>& m, Index k) {
  return row_sparse_project(project_nonneg(m), k);
}

// Joint projection onto { A >= 0, at most k nonzeros per column }. Columns are
// independent, so each keeps its k largest clamped entries.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> prox_col_sparse_nonneg(
    const Eigen::MatrixBase<Derived>& m, Index k) {
  using Scalar = typename Derived::Scalar;
  if (k < 0) throw std::invalid_argument("prox_col_sparse_nonneg: k must be >= 0");
  DenseMatrix<Scalar> clamped = project_nonneg(m);
  if (k >= clamped.rows()) return clamped;
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(clamped.rows(), clamped.cols());
  std::vector<Index> order(static_cast<std::size_t>(clamped.rows()));
  for (Index j = 0; j < clamped.cols(); ++j) {
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&clamped, j](Index a, Index b) {
      return clamped(a, j) > clamped(b, j);
    });
    for (Index t = 0; t < k; ++t) out(order[t], j) = clamped(order[t], j);
  }
  return out;
}

// Joint projection onto { A >= 0, at most `budget` nonzeros in total }. Keeps
// the largest clamped entries matrix-wide; ties resolve towards the lower
// column-major linear index.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> prox_entry_sparse_nonneg(
    const Eigen::MatrixBase<Derived>& m, Index budget) {
  using Scalar = typename Derived::Scalar;
  if (budget < 0)
    throw std::invalid_argument("prox_entry_sparse_nonneg: budget must be >= 0");
  DenseMatrix<Scalar> clamped = project_nonneg(m);
  if (budget >= clamped.size()) return clamped;
  std::vector<Index> order(static_cast<std::size_t>(clamped.size()));
  std::iota(order.begin(), order.end(), Index(0));
  const Scalar* data = clamped.data();
  std::stable_sort(order.begin(), order.end(),
                   [data](Index a, Index b) { return data[a] > data[b]; });
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(clamped.rows(), clamped.cols());
  for (Index t = 0; t < budget; ++t) out.data()[order[t]] = data[order[t]];
  return out;
}

}  // namespace ssnmf

#endif
