#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include "toom/quadrature.hpp"

namespace toom::rmt {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Nystrom matrix sqrt(w_i) K(x_i, y_j) sqrt(w_j) of a kernel between two rules.
template <typename Scalar, typename Kernel>
Matrix<Scalar> kernel_matrix(const Quadrature<Scalar>& rows, const Quadrature<Scalar>& cols,
                             Kernel&& kernel) {
  using std::sqrt;
  Matrix<Scalar> m(rows.size(), cols.size());
  for (Eigen::Index j = 0; j < cols.size(); ++j) {
    const Scalar wj = sqrt(cols.weights[j]);
    for (Eigen::Index i = 0; i < rows.size(); ++i) {
      m(i, j) = sqrt(rows.weights[i]) * kernel(rows.nodes[i], cols.nodes[j]) * wj;
    }
  }
  return m;
}

/// det(I - K) via LU with partial pivoting.
template <typename Derived>
typename Derived::Scalar det_identity_minus(const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> a = Matrix<Scalar>::Identity(k.rows(), k.cols()) - k;
  return a.partialPivLu().determinant();
}

/// Fredholm determinant det(I - K) on the interval carried by `q`.
template <typename Scalar, typename Kernel>
Scalar fredholm_det(const Quadrature<Scalar>& q, Kernel&& kernel) {
  return det_identity_minus(kernel_matrix(q, q, std::forward<Kernel>(kernel)));
}

}  // namespace toom::rmt
