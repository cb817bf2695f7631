#pragma once

#include <Eigen/Dense>

namespace nnim {

/// Dense real matrix, rows = users. Row-major so per-user row work is
/// contiguous.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Entrywise L1 displacement between two equally shaped matrices.
inline double displacement_l11(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().sum();
}

}  // namespace nnim
