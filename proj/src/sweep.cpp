#include "semispec/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "semispec/models.hpp"

namespace semispec {

namespace {

RowError capture(const Error& e) { return {e.kind(), e.type_name(), e.what()}; }

struct LeftmostRun {
  Complex value;
  double residual = 0.0;
  std::size_t n_used = 0;
};

LeftmostRun refined_leftmost(const PotentialProfile& profile, const Domain& domain, double h,
                             ResolutionRegime regime, const SweepOptions& opts) {
  if (opts.levels < 2) throw ConfigError("sweep: levels must be at least 2");
  const ResolutionRule rule{regime, opts.points_per_scale};
  const int dim = domain_dim(domain);
  const std::size_t cap = opts.n_max > 0 ? opts.n_max : (dim == 1 ? kDefaultNMax1D : kDefaultNMax2D);
  const int factor = 1 << (opts.levels - 1);
  const std::size_t growth = dim == 1 ? factor : static_cast<std::size_t>(factor) * factor;
  Grid base;
  try {
    // the finest level fits in cap exactly when the base grid fits in cap / factor^dim
    base = grid_for(h, domain, rule, std::max<std::size_t>(1, cap / growth));
  } catch (const InfeasibleResolution& e) {
    std::ostringstream os;
    os << "infeasible resolution: h = " << h << " needs more than N_max = " << cap << " nodes on the finest of "
       << opts.levels << " refinement levels; smallest feasible h = " << e.smallest_feasible_h();
    throw InfeasibleResolution(os.str(), e.smallest_feasible_h());
  }
  const SpectrumResult s = refine_filter(
      [&](int level) { return assemble(base.refined(1 << level), profile, h); },
      [&](const AssembledOperator& op) { return compute_spectrum(op, opts.solver); }, opts.levels);
  const std::size_t i = leftmost_index(s);
  return {s.eigenvalues[i], s.residuals[i], base.refined(factor).size()};
}

ResolutionRegime resolution_for(const PredictedAsymptote& p) {
  return p.regime == Regime::Morse ? ResolutionRegime::Morse : ResolutionRegime::Airy;
}

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

std::vector<double> default_hs(int count) {
  std::vector<double> hs;
  for (int k = 0; k < count; ++k) hs.push_back(0.02 * std::ldexp(1.0, -k));
  return hs;
}

SweepOutcome run_h_sweep(const PotentialProfile& profile, const Domain& domain, const std::vector<double>& hs,
                         const SweepOptions& opts) {
  if (hs.empty()) throw ConfigError("hs empty");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw ConfigError("hs must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1])) throw ConfigError("hs must be strictly decreasing");
  }
  SweepOutcome out;
  out.predicted = predicted_limit(profile, domain, opts.regime);
  const double p = out.predicted.h_exponent;
  for (double h : hs) {
    SweepRow row;
    row.h = h;
    try {
      const LeftmostRun r = refined_leftmost(profile, domain, h, resolution_for(out.predicted), opts);
      row.leftmost = r.value;
      row.residual = r.residual;
      row.n_used = r.n_used;
      const double scale = std::pow(h, p);
      row.scaled_real = r.value.real() / scale;
      if (out.predicted.regime == Regime::Morse) {
        row.scaled_imag_offset = (r.value.imag() - out.predicted.imag_center) / scale;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) throw;
      row.error = capture(e);
    }
    out.rows.push_back(row);
  }
  return out;
}

FitResult fit_powerlaw(const std::vector<SweepRow>& rows, const PredictedAsymptote& predicted) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.ok() && r.leftmost.real() > 0.0 && r.h > 0.0) {
      xs.push_back(std::log(r.h));
      ys.push_back(std::log(r.leftmost.real()));
    }
  }
  if (xs.size() < 3) {
    throw ConfigError("fit_powerlaw: fewer than 3 valid rows (" + std::to_string(xs.size()) + ")");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit_powerlaw: rows need distinct h");
  FitResult f;
  f.rows_used = xs.size();
  f.fitted_exponent = sxy / sxx;
  f.fitted_prefactor = std::exp(my - f.fitted_exponent * mx);
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + f.fitted_exponent * (xs[i] - mx));
    ss_res += e * e;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  f.prefactor_at_theory = std::exp(my - predicted.h_exponent * mx);
  f.relative_error_vs_theory = predicted.prefactor > 0.0 && std::isfinite(predicted.prefactor)
                                   ? std::abs(f.prefactor_at_theory - predicted.prefactor) / predicted.prefactor
                                   : std::nan("");
  return f;
}

TheoryVerdict compare_to_theory(const FitResult& fit, const PredictedAsymptote& predicted, double tolerance) {
  TheoryVerdict v;
  v.exponent_error = std::abs(fit.fitted_exponent - predicted.h_exponent);
  v.prefactor_error = std::abs(fit.prefactor_at_theory - predicted.prefactor) / std::abs(predicted.prefactor);
  const bool exp_ok = v.exponent_error <= kExponentTolerance;
  const bool pre_ok = v.prefactor_error <= tolerance;  // false for NaN
  v.pass = exp_ok && pre_ok;
  std::ostringstream os;
  os.precision(6);
  os << "exponent " << fit.fitted_exponent << " vs " << predicted.h_exponent << " (|diff| " << v.exponent_error
     << (exp_ok ? " <= " : " > ") << kExponentTolerance << "); prefactor " << fit.prefactor_at_theory << " vs "
     << predicted.prefactor << " (rel err " << v.prefactor_error << (pre_ok ? " <= " : " > ") << tolerance << ")";
  if (predicted.lower_bound_only) os << "; prediction is a lower bound only";
  v.details = os.str();
  return v;
}

GLReport gl_preset(const PotentialProfile& phi, const Domain& domain, const std::vector<double>& Rs,
                   const SweepOptions& opts) {
  if (Rs.empty()) throw ConfigError("Rs empty");
  for (double R : Rs) {
    if (!(R > 0.0)) throw ConfigError("Rs must be positive");
  }
  const CriticalPointSearch cps = find_critical_points(phi, domain);
  if (!cps.interior.empty() || !cps.near_boundary.empty() || !cps.flagged_cells.empty()) {
    throw RegimeError("gl_preset: the potential has a critical point in the closed domain");
  }
  const BoundaryData bd = boundary_data(phi, domain);
  const GLStability st = gl_stability(bd.J_m);
  GLReport rep;
  rep.J_m = bd.J_m;
  rep.J_c = st.J_c;
  rep.predicted_stable = st.stable;

  double largest_valid = -1.0;
  for (double R : Rs) {
    GLRow row;
    row.R = R;
    row.h = std::pow(R, -1.5);
    row.outside_asymptotic = row.h > kGLAsymptoticH;
    try {
      const LeftmostRun r = refined_leftmost(phi, domain, row.h, ResolutionRegime::Airy, opts);
      row.re_leftmost = r.value.real();
      row.gl_decay_rate = r.value.real() / std::cbrt(row.h * row.h) - 1.0;
      row.stable = row.gl_decay_rate > 0.0;
      if (R > largest_valid) {
        largest_valid = R;
        rep.observed_stable = row.stable;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) throw;
      row.error = capture(e);
    }
    rep.rows.push_back(row);
  }
  rep.consistent = rep.observed_stable.has_value() && *rep.observed_stable == rep.predicted_stable;
  return rep;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "h,re_leftmost,im_leftmost,scaled_real,scaled_imag_offset,n,residual\n";
  for (const auto& r : rows) {
    put(os, r.h);
    os << ',';
    put(os, r.leftmost.real());
    os << ',';
    put(os, r.leftmost.imag());
    os << ',';
    put(os, r.scaled_real);
    os << ',';
    put(os, r.scaled_imag_offset);
    os << ',' << r.n_used << ',';
    put(os, r.residual);
    os << '\n';
  }
}

void write_gl_csv(std::ostream& os, const std::vector<GLRow>& rows) {
  os << "R,h,re_leftmost,gl_decay_rate,stable\n";
  for (const auto& r : rows) {
    put(os, r.R);
    os << ',';
    put(os, r.h);
    os << ',';
    put(os, r.re_leftmost);
    os << ',';
    put(os, r.gl_decay_rate);
    os << ',' << (r.error ? "error" : (r.stable ? "true" : "false")) << '\n';
  }
}

}  // namespace semispec
