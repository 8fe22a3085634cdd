#ifndef SSNMF_NORMS_HPP
#define SSNMF_NORMS_HPP

#include <cmath>
#include <stdexcept>

#include "ssnmf/types.hpp"

namespace ssnmf {

template <typename Derived>
typename Derived::Scalar frobenius_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.norm();
}

// Number of nonzero entries. Exact comparison against zero: values that
// should count as zero must be zeroed by the caller first.
template <typename Derived>
Index l0_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return (m.derived().array() != Scalar(0)).count();
}

// Number of rows with at least one nonzero entry.
template <typename Derived>
Index l20_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return (m.derived().array() != Scalar(0)).rowwise().any().count();
}

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value via power iteration on the smaller Gram matrix.
// Deterministic: starts from the normalized all-ones vector and stops once
// the Rayleigh quotient changes by at most tol in relative terms. A start
// vector inside the kernel of a PSD Gram matrix certifies sigma_max(m) = 0
// along every direction the iteration can reach, so that case returns 0.
// On hitting max_iter the last estimate is returned with converged = false;
// callers decide whether to accept it.
template <typename Derived>
PowerIterationResult spectral_norm_power(const Eigen::MatrixBase<Derived>& m,
                                         double tol = 1e-9,
                                         int max_iter = 1000) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("spectral_norm: empty matrix");
  if (!(tol > 0.0))
    throw std::invalid_argument("spectral_norm: tol must be positive");
  if (max_iter < 1)
    throw std::invalid_argument("spectral_norm: max_iter must be positive");

  Matrix gram;
  if (m.cols() <= m.rows())
    gram.noalias() = (m.transpose() * m).template cast<double>();
  else
    gram.noalias() = (m * m.transpose()).template cast<double>();

  const Index d = gram.rows();
  Vector v = Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));

  PowerIterationResult result;
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    result.iterations = it;
    const Vector gv = gram * v;
    const double lambda_next = v.dot(gv);  // Rayleigh quotient, >= 0 up to roundoff
    const double scale = gv.norm();
    if (scale == 0.0) {
      result.value = 0.0;
      result.converged = true;
      return result;
    }
    v = gv / scale;
    if (std::abs(lambda_next - lambda) <= tol * std::abs(lambda_next) && it > 1) {
      result.value = std::sqrt(std::max(lambda_next, 0.0));
      result.converged = true;
      return result;
    }
    lambda = lambda_next;
  }
  result.value = std::sqrt(std::max(lambda, 0.0));
  result.converged = false;
  return result;
}

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m, double tol = 1e-9,
                     int max_iter = 1000) {
  return spectral_norm_power(m, tol, max_iter).value;
}

}  // namespace ssnmf

#endif
