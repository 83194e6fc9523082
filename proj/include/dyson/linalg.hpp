#pragma once

#include <Eigen/LU>

#include "dyson/errors.hpp"
#include "dyson/types.hpp"

namespace dyson {

inline constexpr Eigen::Index kMaxDeterminantSize = 16;

/// Determinant by LU with partial (row) pivoting. Singular input gives 0 up to
/// rounding.
template <typename Derived>
typename Derived::Scalar det_eval(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw ShapeError("det_eval: matrix is not square");
  if (m.rows() > kMaxDeterminantSize) throw CapacityError("det_eval: n > 16");
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0) return Scalar(1);
  if (m.rows() == 1) return m(0, 0);
  if (m.rows() == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Matrix<Scalar> dense = m;
  return Eigen::PartialPivLU<Matrix<Scalar>>(dense).determinant();
}

}  // namespace dyson
