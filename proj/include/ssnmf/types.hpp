#ifndef SSNMF_TYPES_HPP
#define SSNMF_TYPES_HPP

#include <Eigen/Dense>

namespace ssnmf {

inline constexpr const char* kVersion = "0.1.0";

using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Column-major double matrices carry X (p-by-n), W (p-by-r) and H (r-by-n)
// throughout the library.
using Matrix = DenseMatrix<double>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

}  // namespace ssnmf

#endif
