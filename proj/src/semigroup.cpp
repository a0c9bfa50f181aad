#include "semispec/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "semispec/detail/dense.hpp"
#include "semispec/detail/parallel.hpp"
#include "semispec/error.hpp"

namespace semispec {

namespace {

void check_cap(const AssembledOperator& op, Eigen::Index dense_cap) {
  if (op.rows() > dense_cap) {
    std::ostringstream os;
    os << "propagator: N = " << op.rows() << " exceeds the dense cap " << dense_cap;
    throw ConfigError(os.str());
  }
}

double spectral_norm(const Eigen::MatrixXcd& m) { return detail::singular_values(m)[0]; }

}  // namespace

double propagator_norm(const AssembledOperator& op, double t, Eigen::Index dense_cap) {
  if (!(t >= 0.0)) throw ConfigError("propagator_norm: t must be nonnegative");
  check_cap(op, dense_cap);
  if (t == 0.0) return 1.0;
  const Eigen::MatrixXcd m = (-t * op.dense()).exp();
  return spectral_norm(m);
}

DecayCurve decay_curve(const AssembledOperator& op, double t_max, int samples, Eigen::Index dense_cap) {
  if (samples < 2) throw ConfigError("decay_curve: need at least 2 samples");
  if (!(t_max > 0.0)) throw ConfigError("decay_curve: t_max must be positive");
  check_cap(op, dense_cap);
  DecayCurve c;
  c.op_id = op.id();
  const double dt = t_max / (samples - 1);
  const Eigen::MatrixXcd step = (-dt * op.dense()).exp();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(op.rows(), op.rows());
  for (int i = 0; i < samples; ++i) {
    c.ts.push_back(dt * i);
    c.norms.push_back(i == 0 ? 1.0 : spectral_norm(p));
    if (i + 1 < samples) p = p * step;
  }
  return c;
}

DecayCurve decay_curve_at(const AssembledOperator& op, const std::vector<double>& ts, Eigen::Index dense_cap,
                          unsigned threads) {
  check_cap(op, dense_cap);
  DecayCurve c;
  c.op_id = op.id();
  c.ts = ts;
  c.norms.resize(ts.size());
  detail::parallel_for(ts.size(), threads, [&](std::size_t i) { c.norms[i] = propagator_norm(op, ts[i], dense_cap); });
  return c;
}

double decay_rate_fit(const DecayCurve& curve, std::pair<double, double> window) {
  if (curve.ts.size() != curve.norms.size()) throw ConfigError("decay_rate_fit: ts and norms differ in length");
  double st = 0, sy = 0, stt = 0, sty = 0;
  int count = 0;
  for (std::size_t i = 0; i < curve.ts.size(); ++i) {
    const double t = curve.ts[i];
    if (t < window.first || t > window.second) continue;
    const double n = curve.norms[i];
    if (!(n > 0.0)) throw ConfigError("decay_rate_fit: norms must be positive");
    if (n < kUnderflowFloor) {
      std::ostringstream os;
      os << "decay_rate_fit: norm " << n << " at t = " << t << " is below " << kUnderflowFloor
         << "; shrink the window";
      throw NumericalError(os.str());
    }
    const double y = -std::log(n);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (count < 5) throw ConfigError("decay_rate_fit: fewer than 5 samples in the window");
  const double denom = count * stt - st * st;
  if (!(denom > 0.0)) throw ConfigError("decay_rate_fit: degenerate window");
  return (count * sty - st * sy) / denom;
}

std::pair<double, double> default_fit_window(double rate_guess) {
  if (!(rate_guess > 0.0)) throw ConfigError("default_fit_window: rate guess must be positive");
  return {2.0 / rate_guess, 6.0 / rate_guess};
}

double DecayEnvelope::operator()(double t) const { return M * std::exp(-rate * t); }

DecayEnvelope gp_envelope(double resolvent_bound, double omega, double c0, const std::vector<double>& ts) {
  if (!(omega > 0.0)) throw ConfigError("gp_envelope: omega must be positive");
  if (!(resolvent_bound > 0.0)) throw ConfigError("gp_envelope: resolvent bound must be positive");
  if (!(c0 > 0.0)) throw ConfigError("gp_envelope: c0 must be positive");
  DecayEnvelope e;
  e.resolvent_bound = resolvent_bound;
  e.rate = omega;
  e.c0 = c0;
  e.M1 = 2.0 * omega * resolvent_bound / (1.0 - std::exp(-c0));
  e.M2 = std::exp(2.0 * c0);
  e.M = std::max(e.M1, e.M2);
  e.ts = ts;
  for (double t : ts) e.values.push_back(e(t));
  return e;
}

void write_decay_csv(std::ostream& os, const DecayCurve& curve, const DecayEnvelope* envelope) {
  os << "t,norm,envelope\n";
  char buf[128];
  for (std::size_t i = 0; i < curve.ts.size(); ++i) {
    const double env = envelope ? (*envelope)(curve.ts[i]) : std::nan("");
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", curve.ts[i], curve.norms[i], env);
    os << buf;
  }
}

}  // namespace semispec
