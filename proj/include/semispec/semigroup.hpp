#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semispec/discretize.hpp"
#include "semispec/eigensolve.hpp"

namespace semispec {

/// ||exp(-t A)||_2 by scaling-and-squaring Pade and a dense SVD. Dense only.
double propagator_norm(const AssembledOperator& op, double t, Eigen::Index dense_cap = kDefaultDenseCap);

struct DecayCurve {
  std::vector<double> ts;
  std::vector<double> norms;
  std::string op_id;
};

/// Norms at t_i = i * t_max / (samples - 1). The step propagator is computed once and
/// applied repeatedly.
DecayCurve decay_curve(const AssembledOperator& op, double t_max, int samples,
                       Eigen::Index dense_cap = kDefaultDenseCap);

/// Norms at arbitrary nonnegative times, one exponential per time.
DecayCurve decay_curve_at(const AssembledOperator& op, const std::vector<double>& ts,
                          Eigen::Index dense_cap = kDefaultDenseCap, unsigned threads = 1);

inline constexpr double kUnderflowFloor = 1e-14;

/// Least-squares slope of -log(norm) against t over samples with t in [lo, hi].
double decay_rate_fit(const DecayCurve& curve, std::pair<double, double> window);

/// [2 / rate_guess, 6 / rate_guess].
std::pair<double, double> default_fit_window(double rate_guess);

struct DecayEnvelope {
  double M = 1.0;
  double M1 = 0.0;
  double M2 = 1.0;
  double rate = 0.0;
  double resolvent_bound = 0.0;
  double c0 = 1.0;
  std::vector<double> ts;
  std::vector<double> values;  // M * exp(-rate * t)

  double operator()(double t) const;
};

/// M1 = 2 omega bound / (1 - e^{-c0}), M2 = e^{2 c0}, M = max(M1, M2), rate = omega.
DecayEnvelope gp_envelope(double resolvent_bound, double omega, double c0, const std::vector<double>& ts);

/// CSV "t,norm,envelope"; the envelope column is evaluated at each curve time.
void write_decay_csv(std::ostream& os, const DecayCurve& curve, const DecayEnvelope* envelope);

}  // namespace semispec
