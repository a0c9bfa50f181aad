#pragma once

// Thin wrappers over LAPACK dense kernels.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace semispec::detail {

/// All eigenvalues of a general complex matrix (zgeev); right eigenvectors as
/// columns of `vectors` when non-null.
Eigen::VectorXcd dense_eigen(Eigen::MatrixXcd a, Eigen::MatrixXcd* vectors);

/// Singular values in descending order (zgesdd, values only).
Eigen::VectorXd singular_values(Eigen::MatrixXcd a);

}  // namespace semispec::detail
