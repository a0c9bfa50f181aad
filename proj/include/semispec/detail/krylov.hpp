#pragma once

// Krylov-Schur Arnoldi for the largest-magnitude eigenvalues of a complex
// linear operator given only through its action.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace semispec::detail {

using ApplyFn = std::function<void(const Eigen::VectorXcd& in, Eigen::VectorXcd& out)>;

struct KrylovOptions {
  int nev = 6;
  int ncv = 24;            // subspace dimension (capped at the problem size)
  double tol = 1e-13;      // Ritz residual relative to |theta|
  int max_restarts = 300;
};

struct KrylovResult {
  std::vector<std::complex<double>> values;  // largest |theta| first
  Eigen::MatrixXcd vectors;                  // unit-norm Ritz vectors, one per column
  std::vector<double> ritz_residuals;        // |beta * e_m^T s| / |theta|
  int restarts = 0;
  bool converged = false;
};

KrylovResult largest_magnitude(const ApplyFn& apply, Eigen::Index n, const KrylovOptions& opts);

/// Swaps the adjacent diagonal entries k, k+1 of the upper-triangular T by a unitary
/// rotation, accumulating it into the columns of Q.
void swap_schur_pair(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, Eigen::Index k);

}  // namespace semispec::detail
