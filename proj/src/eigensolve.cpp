#include "semispec/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/SparseLU>

#include "semispec/detail/dense.hpp"
#include "semispec/detail/krylov.hpp"
#include "semispec/detail/parallel.hpp"
#include "semispec/error.hpp"

namespace semispec {

namespace {

using SparseColC = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

double one_norm(const SparseMatrixC& a) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(a.cols());
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrixC::InnerIterator it(a, r); it; ++it) col[it.col()] += std::abs(it.value());
  }
  return col.size() ? col.maxCoeff() : 0.0;
}

double residual_of(const SparseMatrixC& a, const Eigen::VectorXcd& v, Complex lambda) {
  const Eigen::VectorXcd r = a * v - lambda * v;
  return r.norm() / v.norm();
}

bool lex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void sort_pairs(SpectrumResult& s) {
  std::vector<std::size_t> idx(s.eigenvalues.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(s.eigenvalues[a], s.eigenvalues[b]); });
  std::vector<Complex> ev;
  std::vector<double> res;
  for (std::size_t i : idx) {
    ev.push_back(s.eigenvalues[i]);
    res.push_back(s.residuals[i]);
  }
  s.eigenvalues = std::move(ev);
  s.residuals = std::move(res);
}

struct ShiftOutcome {
  std::vector<Complex> values;
  std::vector<double> residuals;
};

ShiftOutcome solve_at_shift(const AssembledOperator& op, const SparseColC& a, Complex sigma, const ShiftPlan& plan) {
  const Eigen::Index n = a.rows();
  SparseColC eye(n, n);
  eye.setIdentity();
  Eigen::SparseLU<SparseColC, Eigen::COLAMDOrdering<int>> lu;
  auto try_factor = [&](Complex s) {
    SparseColC shifted = a - s * eye;
    shifted.makeCompressed();
    lu.compute(shifted);
    // a zero pivot surfaces as NumericalIssue
    return lu.info() == Eigen::Success && std::isfinite(std::real(lu.logAbsDeterminant()));
  };
  if (!try_factor(sigma)) {
    sigma += plan.tol;
    if (!try_factor(sigma)) {
      std::ostringstream os;
      os << "factorization of A - sigma I failed at sigma = " << sigma << " (sigma is an eigenvalue)";
      throw SingularShift(os.str());
    }
  }

  detail::KrylovOptions ko;
  ko.nev = std::max(1, std::min<int>(plan.k_per_shift, static_cast<int>(n)));
  ko.ncv = 4 * ko.nev;
  ko.max_restarts = plan.max_iterations;
  const auto kr = detail::largest_magnitude(
      [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out = lu.solve(in); }, n, ko);

  ShiftOutcome outcome;
  for (std::size_t i = 0; i < kr.values.size(); ++i) {
    const Complex theta = kr.values[i];
    if (std::abs(theta) == 0.0) continue;
    const Complex lambda = sigma + 1.0 / theta;
    const Eigen::VectorXcd v = kr.vectors.col(static_cast<Eigen::Index>(i));
    const double r = residual_of(op.matrix, v, lambda);
    if (r <= plan.tol) {
      outcome.values.push_back(lambda);
      outcome.residuals.push_back(r);
    }
  }
  return outcome;
}

}  // namespace

SpectrumResult dense_spectrum(const AssembledOperator& op, Eigen::Index dense_cap) {
  const Eigen::Index n = op.rows();
  if (n > dense_cap) {
    std::ostringstream os;
    os << "dense_spectrum: N = " << n << " exceeds the dense cap " << dense_cap << "; use shift_invert_leftmost";
    throw ConfigError(os.str());
  }
  Eigen::MatrixXcd vecs;
  const Eigen::VectorXcd w = detail::dense_eigen(op.dense(), &vecs);
  SpectrumResult out;
  out.method = SpectrumMethod::Dense;
  out.grid_id = op.id();
  out.tolerance = 1e-8 * std::max(1.0, one_norm(op.matrix));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues.push_back(w[i]);
    out.residuals.push_back(residual_of(op.matrix, vecs.col(i), w[i]));
  }
  sort_pairs(out);
  return out;
}

ShiftPlan default_shift_plan(const AssembledOperator& op) {
  Eigen::VectorXd v = op.potential_diagonal();
  std::vector<double> vals(v.data(), v.data() + v.size());
  std::sort(vals.begin(), vals.end());
  ShiftPlan plan;
  for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double pos = p * static_cast<double>(vals.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, vals.size() - 1);
    const double q = vals[lo] + (pos - static_cast<double>(lo)) * (vals[hi] - vals[lo]);
    const Complex s(0.0, q);
    if (plan.shifts.empty() || std::abs(plan.shifts.back() - s) > 0.0) plan.shifts.push_back(s);
  }
  return plan;
}

SpectrumResult shift_invert_leftmost(const AssembledOperator& op, const ShiftPlan& plan) {
  if (plan.shifts.empty()) throw ConfigError("shift plan has no shifts");
  for (const Complex& s : plan.shifts) {
    if (s.real() < 0.0) throw ConfigError("shift plan: shifts must have nonnegative real part");
  }
  if (plan.k_per_shift < 1) throw ConfigError("shift plan: k_per_shift must be positive");
  if (!(plan.tol > 0.0)) throw ConfigError("shift plan: tol must be positive");

  const SparseColC a(op.matrix);
  std::vector<ShiftOutcome> per_shift(plan.shifts.size());
  detail::parallel_for(plan.shifts.size(), plan.threads,
                       [&](std::size_t i) { per_shift[i] = solve_at_shift(op, a, plan.shifts[i], plan); });

  SpectrumResult out;
  out.method = SpectrumMethod::ShiftInvert;
  out.shifts = plan.shifts;
  out.grid_id = op.id();
  out.tolerance = plan.tol;
  const double scale = std::max(1.0, one_norm(op.matrix));
  for (const auto& o : per_shift) {
    for (std::size_t k = 0; k < o.values.size(); ++k) {
      bool merged = false;
      for (std::size_t j = 0; j < out.eigenvalues.size(); ++j) {
        if (std::abs(out.eigenvalues[j] - o.values[k]) < plan.tol * scale) {
          if (o.residuals[k] < out.residuals[j]) {
            out.eigenvalues[j] = o.values[k];
            out.residuals[j] = o.residuals[k];
          }
          merged = true;
          break;
        }
      }
      if (!merged) {
        out.eigenvalues.push_back(o.values[k]);
        out.residuals.push_back(o.residuals[k]);
      }
    }
  }
  out.empty_flagged = out.eigenvalues.empty();
  sort_pairs(out);
  return out;
}

std::size_t leftmost_index(const SpectrumResult& spec) {
  if (spec.eigenvalues.empty()) throw NumericalError("leftmost: empty spectrum");
  std::size_t best = 0;
  for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i) {
    const Complex a = spec.eigenvalues[i], b = spec.eigenvalues[best];
    const double tie = 1e-10 * std::max({1.0, std::abs(a.real()), std::abs(b.real())});
    if (a.real() < b.real() - tie) {
      best = i;
    } else if (std::abs(a.real() - b.real()) <= tie) {
      if (std::abs(a.imag()) < std::abs(b.imag()) ||
          (std::abs(a.imag()) == std::abs(b.imag()) && a.imag() < b.imag())) {
        best = i;
      }
    }
  }
  return best;
}

Complex leftmost(const SpectrumResult& spec) { return spec.eigenvalues[leftmost_index(spec)]; }

SpectrumResult compute_spectrum(const AssembledOperator& op, const SolverOptions& opts) {
  SolverMethod m = opts.method;
  if (m == SolverMethod::Auto) {
    m = op.rows() <= std::min(opts.auto_dense_below, opts.dense_cap) ? SolverMethod::Dense : SolverMethod::ShiftInvert;
  }
  if (m == SolverMethod::Dense) return dense_spectrum(op, opts.dense_cap);
  ShiftPlan plan = opts.shifts_override.empty() ? default_shift_plan(op) : ShiftPlan{};
  if (!opts.shifts_override.empty()) plan.shifts = opts.shifts_override;
  plan.shifts.insert(plan.shifts.end(), opts.extra_shifts.begin(), opts.extra_shifts.end());
  plan.k_per_shift = opts.k_per_shift;
  plan.tol = opts.tol;
  plan.max_iterations = opts.max_iterations;
  plan.threads = opts.threads;
  return shift_invert_leftmost(op, plan);
}

double default_match_tol(Complex lambda) { return 1e-4 * (1.0 + std::abs(lambda)); }

SpectrumResult refine_filter(const OperatorBuilder& builder, const SpectrumSolver& solver, int levels,
                             const std::function<double(Complex)>& match_tol) {
  if (levels < 2) throw ConfigError("refine_filter needs at least 2 levels");
  std::vector<SpectrumResult> specs;
  for (int l = 0; l < levels; ++l) specs.push_back(solver(builder(l)));
  for (int l = 0; l < levels; ++l) {
    if (specs[static_cast<std::size_t>(l)].eigenvalues.empty()) {
      throw InstabilityError("refine_filter: no eigenvalues at level " + std::to_string(l));
    }
  }

  auto nearest = [](const SpectrumResult& s, Complex z) {
    double d = std::numeric_limits<double>::infinity();
    for (const Complex& w : s.eigenvalues) d = std::min(d, std::abs(w - z));
    return d;
  };

  const SpectrumResult& fine = specs.back();
  const Complex lf = leftmost(fine);
  bool stable = true;
  for (int l = 0; l + 1 < levels; ++l) {
    const SpectrumResult& s = specs[static_cast<std::size_t>(l)];
    const double tol = match_tol(lf);
    if (std::abs(leftmost(s).real() - lf.real()) > tol || nearest(s, lf) > tol) stable = false;
  }
  if (!stable) {
    std::ostringstream os;
    os.precision(12);
    os << "refine_filter: leftmost eigenvalue unstable across levels:";
    for (int l = 0; l < levels; ++l) os << " level " << l << " = " << leftmost(specs[static_cast<std::size_t>(l)]);
    throw InstabilityError(os.str());
  }

  SpectrumResult out = fine;
  out.eigenvalues.clear();
  out.residuals.clear();
  for (std::size_t i = 0; i < fine.eigenvalues.size(); ++i) {
    const Complex z = fine.eigenvalues[i];
    bool keep = true;
    for (int l = 0; l + 1 < levels && keep; ++l) keep = nearest(specs[static_cast<std::size_t>(l)], z) <= match_tol(z);
    if (keep) {
      out.eigenvalues.push_back(z);
      out.residuals.push_back(fine.residuals[i]);
    }
  }
  return out;
}

}  // namespace semispec
