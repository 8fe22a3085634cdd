#ifndef SSNMF_OBJECTIVE_HPP
#define SSNMF_OBJECTIVE_HPP

#include <stdexcept>

#include "ssnmf/norms.hpp"
#include "ssnmf/types.hpp"

namespace ssnmf {

namespace detail {

inline void check_factor_shapes(const Matrix& x, const Matrix& w, const Matrix& h) {
  if (w.rows() != x.rows() || h.cols() != x.cols() || w.cols() != h.rows())
    throw std::invalid_argument("factor shapes do not match X = W * H");
}

}  // namespace detail

// Penalized objective
//   F(W, H) = 1/2 ||X - WH||_F^2 + rho/2 * sum_j ((1' h_j)^2 - ||h_j||^2).
// The penalty term of column j is the sum of its off-diagonal products
// h_ij h_kj, zero exactly when the column has at most one nonzero entry.
inline double objective_value(const Matrix& x, const Matrix& w, const Matrix& h,
                              double rho) {
  detail::check_factor_shapes(x, w, h);
  if (rho < 0.0) throw std::invalid_argument("objective_value: rho must be >= 0");
  const double fit = 0.5 * (x - w * h).squaredNorm();
  if (rho == 0.0) return fit;
  const double colsum_sq = h.colwise().sum().array().square().sum();
  return fit + 0.5 * rho * (colsum_sq - h.squaredNorm());
}

// Gradient of F in H:
//   W'W H - W'X + rho (1_{r x r} H - H),
// where 1_{r x r} H broadcasts the column sums of H over each row, so the
// r-by-r all-ones matrix is never formed.
inline Matrix grad_h(const Matrix& x, const Matrix& w, const Matrix& h, double rho) {
  detail::check_factor_shapes(x, w, h);
  if (rho < 0.0) throw std::invalid_argument("grad_h: rho must be >= 0");
  Matrix g = (w.transpose() * w) * h - w.transpose() * x;
  if (rho != 0.0) {
    const RowVector colsum = h.colwise().sum();
    g.noalias() += rho * (colsum.replicate(h.rows(), 1) - h);
  }
  return g;
}

// Gradient of F in W: W (H H') - X H'. The penalty does not involve W.
inline Matrix grad_w(const Matrix& x, const Matrix& w, const Matrix& h) {
  detail::check_factor_shapes(x, w, h);
  return w * (h * h.transpose()) - x * h.transpose();
}

// Lipschitz constant of grad_h as a function of H:
// || W'W + rho (1_{r x r} - I_r) ||_2.
inline double lipschitz_h(const Matrix& w, double rho) {
  if (rho < 0.0) throw std::invalid_argument("lipschitz_h: rho must be >= 0");
  Matrix a = w.transpose() * w;
  if (rho != 0.0) {
    a.array() += rho;
    a.diagonal().array() -= rho;
  }
  return spectral_norm(a);
}

// Lipschitz constant of grad_w as a function of W: || H H' ||_2 = sigma_max(H)^2.
inline double lipschitz_w(const Matrix& h) {
  const double sigma = spectral_norm(h);
  return sigma * sigma;
}

}  // namespace ssnmf

#endif
