#pragma once

#include <Eigen/Core>

namespace sg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column k belongs to values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations. Input must be symmetric; eigenvalues are returned in
/// descending order (stable with respect to the original index on ties).
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-14, int max_sweeps = 100);

}  // namespace sg
