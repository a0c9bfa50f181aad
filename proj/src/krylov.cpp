#include "semispec/detail/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace semispec::detail {

namespace {

using Complex = std::complex<double>;

// Plane rotation [c s; -conj(s) c] with c real that annihilates g in (f, g).
void lartg(Complex f, Complex g, double& c, Complex& s) {
  if (g == Complex(0.0)) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (f == Complex(0.0)) {
    c = 0.0;
    s = std::conj(g) / std::abs(g);
    return;
  }
  const double fa = std::abs(f), ga = std::abs(g);
  const double nrm = std::hypot(fa, ga);
  c = fa / nrm;
  s = (f / fa) * std::conj(g) / nrm;
}

Eigen::VectorXcd start_vector(Eigen::Index n) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    v[i] = Complex(1.0 + 0.3 * std::sin(0.7 * t + 0.1), 0.2 * std::cos(1.3 * t));
  }
  return v.normalized();
}

// Moves the `keep` largest-magnitude diagonal entries of T to the leading positions.
void order_schur(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, Eigen::Index keep) {
  const Eigen::Index m = T.rows();
  for (Eigen::Index pos = 0; pos < keep; ++pos) {
    Eigen::Index best = pos;
    for (Eigen::Index i = pos + 1; i < m; ++i) {
      if (std::abs(T(i, i)) > std::abs(T(best, best))) best = i;
    }
    for (Eigen::Index i = best; i > pos; --i) swap_schur_pair(T, Q, i - 1);
  }
}

}  // namespace

void swap_schur_pair(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, Eigen::Index k) {
  const Eigen::Index m = T.rows();
  const Complex t11 = T(k, k), t22 = T(k + 1, k + 1);
  if (t11 == t22) return;
  double c = 1.0;
  Complex s;
  lartg(T(k, k + 1), t22 - t11, c, s);
  for (Eigen::Index col = k + 2; col < m; ++col) {
    const Complex x = T(k, col), y = T(k + 1, col);
    T(k, col) = c * x + s * y;
    T(k + 1, col) = c * y - std::conj(s) * x;
  }
  for (Eigen::Index row = 0; row < k; ++row) {
    const Complex x = T(row, k), y = T(row, k + 1);
    T(row, k) = c * x + std::conj(s) * y;
    T(row, k + 1) = c * y - s * x;
  }
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
  for (Eigen::Index row = 0; row < Q.rows(); ++row) {
    const Complex x = Q(row, k), y = Q(row, k + 1);
    Q(row, k) = c * x + std::conj(s) * y;
    Q(row, k + 1) = c * y - s * x;
  }
}

KrylovResult largest_magnitude(const ApplyFn& apply, Eigen::Index n, const KrylovOptions& opts) {
  KrylovResult out;
  const Eigen::Index nev = std::min<Eigen::Index>(opts.nev, n);
  const Eigen::Index m = std::min<Eigen::Index>(std::max<Eigen::Index>(opts.ncv, nev + 1), n);
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(n, m + 1);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  V.col(0) = start_vector(n);

  Eigen::Index p = 0;       // current factorization size
  Eigen::Index m_eff = m;   // shrinks on breakdown
  Eigen::VectorXcd w(n);
  for (int restart = 0;; ++restart) {
    out.restarts = restart;
    bool breakdown = false;
    for (Eigen::Index j = p; j < m; ++j) {
      apply(V.col(j), w);
      const double wnorm0 = w.norm();
      auto basis = V.leftCols(j + 1);
      Eigen::VectorXcd h = basis.adjoint() * w;
      w.noalias() -= basis * h;
      const Eigen::VectorXcd h2 = basis.adjoint() * w;
      w.noalias() -= basis * h2;
      h += h2;
      H.col(j).head(j + 1) += h;
      const double beta = w.norm();
      if (beta <= 1e-13 * wnorm0 || j + 1 == n) {
        H(j + 1, j) = 0.0;
        m_eff = j + 1;
        breakdown = true;
        break;
      }
      H(j + 1, j) = beta;
      V.col(j + 1) = w / beta;
    }

    const Eigen::MatrixXcd Hm = H.topLeftCorner(m_eff, m_eff);
    const Eigen::RowVectorXcd b = H.row(m_eff).head(m_eff);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(Hm, true);
    const Eigen::VectorXcd theta = ces.eigenvalues();
    Eigen::MatrixXcd S = ces.eigenvectors();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m_eff));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index c) { return std::abs(theta[a]) > std::abs(theta[c]); });

    const Eigen::Index want = std::min(nev, m_eff);
    std::vector<double> res(static_cast<std::size_t>(m_eff));
    Eigen::Index nconv = 0;
    for (Eigen::Index i = 0; i < want; ++i) {
      const Eigen::Index idx = order[static_cast<std::size_t>(i)];
      S.col(idx).normalize();
      const double r = breakdown ? 0.0 : std::abs((b * S.col(idx)).value());
      res[static_cast<std::size_t>(idx)] = r / std::max(std::abs(theta[idx]), 1e-300);
      if (res[static_cast<std::size_t>(idx)] <= opts.tol) ++nconv;
    }

    if (nconv >= want || breakdown || restart >= opts.max_restarts) {
      out.converged = nconv >= want || breakdown;
      out.vectors.resize(n, want);
      for (Eigen::Index i = 0; i < want; ++i) {
        const Eigen::Index idx = order[static_cast<std::size_t>(i)];
        out.values.push_back(theta[idx]);
        out.vectors.col(i) = (V.leftCols(m_eff) * S.col(idx)).normalized();
        out.ritz_residuals.push_back(res[static_cast<std::size_t>(idx)]);
      }
      return out;
    }

    // Krylov-Schur restart: keep the leading Schur block of the wanted Ritz values.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(Hm, true);
    Eigen::MatrixXcd T = schur.matrixT();
    Eigen::MatrixXcd Q = schur.matrixU();
    T.triangularView<Eigen::StrictlyLower>().setZero();
    const Eigen::Index keep = std::min(m_eff - 1, nev + (m_eff - nev) / 2);
    order_schur(T, Q, keep);
    const Eigen::RowVectorXcd bq = b * Q;
    const Eigen::MatrixXcd Vk = V.leftCols(m_eff) * Q.leftCols(keep);
    const Eigen::VectorXcd vnext = V.col(m_eff);
    V.setZero();
    V.leftCols(keep) = Vk;
    V.col(keep) = vnext;
    H.setZero();
    H.topLeftCorner(keep, keep) = T.topLeftCorner(keep, keep);
    H.row(keep).head(keep) = bq.head(keep);
    p = keep;
    m_eff = m;
  }
}

}  // namespace semispec::detail
