#include "semispec/detail/dense.hpp"

#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "semispec/error.hpp"

namespace semispec::detail {

Eigen::VectorXcd dense_eigen(Eigen::MatrixXcd a, Eigen::MatrixXcd* vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXcd w(n);
  lapack_int info = 0;
  if (vectors) {
    vectors->resize(n, n);
    info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, w.data(), nullptr, 1,
                         vectors->data(), n);
  } else {
    info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(), nullptr, 1, nullptr, 1);
  }
  if (info != 0) throw NumericalError("zgeev failed with info = " + std::to_string(info));
  return w;
}

Eigen::VectorXd singular_values(Eigen::MatrixXcd a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd s(std::min(m, n));
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("zgesdd failed with info = " + std::to_string(info));
  return s;
}

}  // namespace semispec::detail
