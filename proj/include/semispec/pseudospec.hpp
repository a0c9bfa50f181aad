#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semispec/discretize.hpp"
#include "semispec/eigensolve.hpp"
#include "semispec/error.hpp"

namespace semispec {

enum class ResolventMethod { DenseSVD, IterativeSmallestSingular };

struct ResolventSample {
  Complex z;
  double norm = 0.0;  // ||(A - z)^{-1}||_2
  ResolventMethod method = ResolventMethod::DenseSVD;
};

struct ResolventOptions {
  /// Dense SVD at or below this size, Lanczos on the factorized inverse above.
  Eigen::Index dense_below = 200;
  double rel_tol = 1e-10;  // stop when successive sigma_min estimates agree this closely
  int max_iterations = 300;
};

/// 1 / sigma_min(A - z). Throws SingularShift when z is an eigenvalue.
ResolventSample resolvent_norm(const AssembledOperator& op, Complex z, const ResolventOptions& opts = {});

/// An eigenvalue lies inside the strip where the resolvent was to be bounded.
class StripViolation : public NumericalError {
 public:
  StripViolation(const std::string& what, std::vector<Complex> offending)
      : NumericalError(what), offending_(std::move(offending)) {}
  const std::vector<Complex>& offending() const noexcept { return offending_; }
  const char* type_name() const noexcept override { return "strip_violation"; }

 private:
  std::vector<Complex> offending_;
};

struct StripOptions {
  std::optional<std::pair<double, double>> nu_range;  // default [min V - 1, max V + 1]
  int nu_samples = 201;
  int refine_top = 3;
  int refine_rounds = 4;
  int refine_points = 11;
  /// Eigenvalues for the precondition check; computed with compute_spectrum when absent.
  const SpectrumResult* spectrum = nullptr;
  /// false samples the line without the eigenvalue check (plain line maximum).
  bool enforce_strip = true;
  SolverOptions solver;
  ResolventOptions resolvent;
  unsigned threads = 1;
};

struct StripResult {
  double sup = 0.0;
  double argmax_nu = 0.0;
  std::vector<ResolventSample> samples;  // the uniform line samples, in nu order
};

/// Max of the resolvent norm on Re z = gamma_max over the sampled nu window, with
/// local refinement around the largest samples. Throws StripViolation when an
/// eigenvalue has Re <= gamma_max.
StripResult strip_sup(const AssembledOperator& op, double gamma_max, const StripOptions& opts = {});

struct Region {
  double re_lo = 0.0, re_hi = 1.0;
  double im_lo = 0.0, im_hi = 1.0;
};

struct PseudospectrumField {
  Region region;
  int nx = 0, ny = 0;
  Eigen::MatrixXd samples;  // samples(j, i): Im index j, Re index i; +inf at eigenvalues

  Complex point(int i, int j) const;
  /// Number of samples with norm >= 1/eps.
  std::size_t count_at_least(double eps) const;
};

PseudospectrumField field(const AssembledOperator& op, const Region& region, int nx, int ny,
                          const ResolventOptions& opts = {}, unsigned threads = 1);

/// CSV "re,im,resolvent_norm", row-major over the region (Im outer, Re inner).
void write_field_csv(std::ostream& os, const PseudospectrumField& f);

}  // namespace semispec
