#pragma once

#include <cmath>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "semispec/discretize.hpp"
#include "semispec/eigensolve.hpp"
#include "semispec/error.hpp"
#include "semispec/potentials.hpp"

namespace semispec {

/// A captured per-row failure; the sweep continues past it.
struct RowError {
  ErrorKind kind = ErrorKind::Numerical;
  std::string type;
  std::string message;
};

struct SweepRow {
  double h = 0.0;
  Complex leftmost{std::nan(""), std::nan("")};
  double scaled_real = std::nan("");
  double scaled_imag_offset = std::nan("");  // Morse regime only
  std::size_t n_used = 0;                    // nodes on the finest refinement level
  double residual = std::nan("");
  std::optional<RowError> error;

  bool ok() const { return !error.has_value(); }
};

struct SweepOptions {
  RegimeChoice regime = RegimeChoice::Auto;
  int points_per_scale = 10;
  int levels = 2;
  std::size_t n_max = 0;  // 0: per-dimension default
  SolverOptions solver;
};

struct SweepOutcome {
  PredictedAsymptote predicted;
  std::vector<SweepRow> rows;
};

/// Geometric h list 0.02 * 2^{-k}, k = 0..count-1.
std::vector<double> default_hs(int count = 3);

/// Per h: grid from the regime's resolution rule, refine_filter over `levels` levels,
/// leftmost eigenvalue scaled by h^{-exponent}. Rows keep their own errors.
SweepOutcome run_h_sweep(const PotentialProfile& profile, const Domain& domain, const std::vector<double>& hs,
                         const SweepOptions& opts = {});

struct FitResult {
  double fitted_exponent = 0.0;
  double fitted_prefactor = 0.0;
  double r_squared = 0.0;
  /// Prefactor refitted with the exponent pinned to the theoretical value.
  double prefactor_at_theory = 0.0;
  double relative_error_vs_theory = 0.0;
  std::size_t rows_used = 0;
};

/// Least squares of log Re(leftmost) on log h over the valid rows (at least 3).
FitResult fit_powerlaw(const std::vector<SweepRow>& rows, const PredictedAsymptote& predicted);

struct TheoryVerdict {
  bool pass = false;
  double exponent_error = 0.0;
  double prefactor_error = 0.0;
  std::string details;
};

inline constexpr double kExponentTolerance = 0.05;

/// Pass iff |fitted exponent - theory| <= 0.05 and relative prefactor error <= tolerance.
TheoryVerdict compare_to_theory(const FitResult& fit, const PredictedAsymptote& predicted, double tolerance);

struct GLRow {
  double R = 0.0;
  double h = 0.0;  // R^{-3/2}
  double re_leftmost = std::nan("");
  double gl_decay_rate = std::nan("");  // h^{-2/3} Re(leftmost) - 1
  bool stable = false;
  bool outside_asymptotic = false;      // h > kGLAsymptoticH
  std::optional<RowError> error;
};

inline constexpr double kGLAsymptoticH = 0.05;

struct GLReport {
  std::vector<GLRow> rows;
  std::optional<double> J_m;
  double J_c = 0.0;
  bool predicted_stable = false;
  /// Sign of gl_decay_rate at the largest R with a valid row.
  std::optional<bool> observed_stable;
  bool consistent = false;
};

/// Rows for h = R^{-3/2}. Refuses profiles with critical points in the closed domain.
GLReport gl_preset(const PotentialProfile& phi, const Domain& domain, const std::vector<double>& Rs,
                   const SweepOptions& opts = {});

/// "h,re_leftmost,im_leftmost,scaled_real,scaled_imag_offset,n,residual"
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// "R,h,re_leftmost,gl_decay_rate,stable"
void write_gl_csv(std::ostream& os, const std::vector<GLRow>& rows);

}  // namespace semispec
