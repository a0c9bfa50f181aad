#include "semispec/pseudospec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/SparseLU>

#include "semispec/detail/dense.hpp"
#include "semispec/detail/parallel.hpp"
#include "semispec/error.hpp"

namespace semispec {

namespace {

using SparseColC = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

[[noreturn]] void throw_singular(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << "resolvent_norm: z = " << z << " is an eigenvalue (A - z is singular)";
  throw SingularShift(os.str());
}

double dense_norm(const AssembledOperator& op, Complex z) {
  Eigen::MatrixXcd m = op.dense();
  m.diagonal().array() -= z;
  const Eigen::VectorXd s = detail::singular_values(std::move(m));
  const double smin = s[s.size() - 1];
  if (!(smin > 1e-14 * std::max(1.0, s[0]))) throw_singular(z);
  return 1.0 / smin;
}

// Largest eigenvalue of (A - z)^{-1} (A - z)^{-*} by Lanczos with full reorthogonalization.
double sparse_norm(const AssembledOperator& op, Complex z, const ResolventOptions& opts) {
  const Eigen::Index n = op.rows();
  SparseColC m(op.matrix);
  SparseColC eye(n, n);
  eye.setIdentity();
  m = m - z * eye;
  m.makeCompressed();
  Eigen::SparseLU<SparseColC, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success || !std::isfinite(std::real(lu.logAbsDeterminant()))) throw_singular(z);

  const int kmax = static_cast<int>(std::min<Eigen::Index>(n, opts.max_iterations));
  Eigen::MatrixXcd Q(n, kmax + 1);
  std::vector<double> alpha, beta;
  Eigen::VectorXcd q = Eigen::VectorXcd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] += Complex(0.1 * std::sin(1.7 * i), 0.05 * std::cos(0.3 * i));
  Q.col(0) = q.normalized();
  double prev = 0.0, est = 0.0;
  for (int k = 0; k < kmax; ++k) {
    const Eigen::VectorXcd y = lu.adjoint().solve(Q.col(k));
    Eigen::VectorXcd w = lu.solve(y);
    if (!w.allFinite()) throw_singular(z);
    const double a = Q.col(k).dot(w).real();
    alpha.push_back(a);
    auto basis = Q.leftCols(k + 1);
    for (int pass = 0; pass < 2; ++pass) w.noalias() -= basis * (basis.adjoint() * w);
    const double b = w.norm();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i < k) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    est = es.eigenvalues().maxCoeff();
    // sigma_min = est^{-1/2}; relative change of sigma_min is half that of est
    if (k > 0 && std::abs(est - prev) <= 2.0 * opts.rel_tol * est) break;
    if (b <= 1e-14 * std::abs(est)) break;
    prev = est;
    beta.push_back(b);
    Q.col(k + 1) = w / b;
  }
  if (!(est > 0.0) || !std::isfinite(est)) throw_singular(z);
  return std::sqrt(est);
}

}  // namespace

ResolventSample resolvent_norm(const AssembledOperator& op, Complex z, const ResolventOptions& opts) {
  ResolventSample s;
  s.z = z;
  if (op.rows() <= opts.dense_below) {
    s.method = ResolventMethod::DenseSVD;
    s.norm = dense_norm(op, z);
  } else {
    s.method = ResolventMethod::IterativeSmallestSingular;
    s.norm = sparse_norm(op, z, opts);
  }
  return s;
}

StripResult strip_sup(const AssembledOperator& op, double gamma_max, const StripOptions& opts) {
  if (opts.nu_samples < 2) throw ConfigError("strip_sup: nu_samples must be at least 2");
  std::vector<Complex> offending;
  if (opts.enforce_strip) {
    SpectrumResult computed;
    const SpectrumResult* spec = opts.spectrum;
    if (!spec) {
      computed = compute_spectrum(op, opts.solver);
      spec = &computed;
    }
    for (const Complex& l : spec->eigenvalues) {
      if (l.real() <= gamma_max) offending.push_back(l);
    }
  }
  if (!offending.empty()) {
    std::ostringstream os;
    os.precision(12);
    os << "strip_sup: eigenvalues inside the strip Re z <= " << gamma_max << ":";
    for (const Complex& l : offending) os << " " << l;
    throw StripViolation(os.str(), offending);
  }

  double lo, hi;
  if (opts.nu_range) {
    std::tie(lo, hi) = *opts.nu_range;
  } else {
    const Eigen::VectorXd v = op.potential_diagonal();
    lo = v.minCoeff() - 1.0;
    hi = v.maxCoeff() + 1.0;
  }
  if (!(hi > lo)) throw ConfigError("strip_sup: empty nu range");

  const int ns = opts.nu_samples;
  const double step = (hi - lo) / (ns - 1);
  StripResult out;
  out.samples.resize(static_cast<std::size_t>(ns));
  detail::parallel_for(static_cast<std::size_t>(ns), opts.threads, [&](std::size_t i) {
    const double nu = lo + step * static_cast<double>(i);
    out.samples[i] = resolvent_norm(op, Complex(gamma_max, nu), opts.resolvent);
  });

  std::vector<std::size_t> idx(out.samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return out.samples[a].norm > out.samples[b].norm; });
  out.sup = out.samples[idx[0]].norm;
  out.argmax_nu = out.samples[idx[0]].z.imag();

  const int top = std::min<int>(opts.refine_top, ns);
  const int pts = std::max(3, opts.refine_points);
  for (int t = 0; t < top; ++t) {
    const double c = out.samples[idx[static_cast<std::size_t>(t)]].z.imag();
    double a = std::max(lo, c - step), b = std::min(hi, c + step);
    for (int round = 0; round < opts.refine_rounds; ++round) {
      std::vector<double> vals(static_cast<std::size_t>(pts));
      const double dz = (b - a) / (pts - 1);
      detail::parallel_for(vals.size(), opts.threads, [&](std::size_t k) {
        vals[k] = resolvent_norm(op, Complex(gamma_max, a + dz * static_cast<double>(k)), opts.resolvent).norm;
      });
      const auto best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
      const double nu_best = a + dz * static_cast<double>(best);
      if (vals[best] > out.sup) {
        out.sup = vals[best];
        out.argmax_nu = nu_best;
      }
      a = std::max(lo, nu_best - dz);
      b = std::min(hi, nu_best + dz);
    }
  }
  return out;
}

Complex PseudospectrumField::point(int i, int j) const {
  const double re = nx > 1 ? region.re_lo + (region.re_hi - region.re_lo) * i / (nx - 1) : region.re_lo;
  const double im = ny > 1 ? region.im_lo + (region.im_hi - region.im_lo) * j / (ny - 1) : region.im_lo;
  return {re, im};
}

std::size_t PseudospectrumField::count_at_least(double eps) const {
  std::size_t c = 0;
  for (Eigen::Index k = 0; k < samples.size(); ++k) {
    if (samples.data()[k] >= 1.0 / eps) ++c;
  }
  return c;
}

PseudospectrumField field(const AssembledOperator& op, const Region& region, int nx, int ny,
                          const ResolventOptions& opts, unsigned threads) {
  if (nx < 1 || ny < 1) throw ConfigError("field: nx and ny must be positive");
  if (!std::isfinite(region.re_lo) || !std::isfinite(region.re_hi) || !std::isfinite(region.im_lo) ||
      !std::isfinite(region.im_hi) || region.re_hi < region.re_lo || region.im_hi < region.im_lo) {
    throw ConfigError("field: region must be finite with ordered bounds");
  }
  PseudospectrumField f;
  f.region = region;
  f.nx = nx;
  f.ny = ny;
  f.samples.resize(ny, nx);
  detail::parallel_for(static_cast<std::size_t>(nx) * ny, threads, [&](std::size_t k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::size_t>(nx));
    try {
      f.samples(j, i) = resolvent_norm(op, f.point(i, j), opts).norm;
    } catch (const SingularShift&) {
      f.samples(j, i) = std::numeric_limits<double>::infinity();
    }
  });
  return f;
}

void write_field_csv(std::ostream& os, const PseudospectrumField& f) {
  os << "re,im,resolvent_norm\n";
  char buf[128];
  for (int j = 0; j < f.ny; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      const Complex z = f.point(i, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", z.real(), z.imag(), f.samples(j, i));
      os << buf;
    }
  }
}

}  // namespace semispec
