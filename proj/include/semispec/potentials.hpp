#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "semispec/expr.hpp"

namespace semispec {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

struct Rectangle {
  Interval x;
  Interval y;
};

using Domain = std::variant<Interval, Rectangle>;

int domain_dim(const Domain& d);
double domain_diameter(const Domain& d);
/// Throws ConfigError unless every interval has lo < hi.
void validate_domain(const Domain& d);

/// V together with its symbolic gradient and Hessian.
class PotentialProfile {
 public:
  PotentialProfile(PotentialExpr expr, int dim);
  static PotentialProfile parse(std::string_view text, int dim);

  int dim() const { return dim_; }
  const PotentialExpr& expr() const { return expr_; }
  const PotentialExpr& grad(int i) const { return grad_[i]; }
  const PotentialExpr& hess(int i, int j) const { return hess_[i][j]; }
  const std::string& text() const { return text_; }

  double value(double x, double y = 0.0) const { return expr_.evaluate(x, y); }
  std::array<double, 2> gradient(double x, double y = 0.0) const;
  std::array<std::array<double, 2>, 2> hessian(double x, double y = 0.0) const;

 private:
  PotentialExpr expr_;
  int dim_;
  std::string text_;
  std::array<PotentialExpr, 2> grad_;
  std::array<std::array<PotentialExpr, 2>, 2> hess_;
};

struct CriticalPoint {
  std::vector<double> location;
  std::vector<double> hess_eigenvalues;  // ascending
  double kappa = 0.0;
  double level = 0.0;
  bool degenerate = false;
};

struct CriticalPointSearch {
  std::vector<CriticalPoint> interior;
  /// Roots within the boundary margin of the domain; they invalidate the Morse regime.
  std::vector<CriticalPoint> near_boundary;
  /// Seed cells where grad V changes sign but Newton converged from none of the seeds.
  std::vector<std::vector<double>> flagged_cells;
};

/// Multi-start Newton on grad V = 0 from a uniform seeds_per_axis^dim grid.
CriticalPointSearch find_critical_points(const PotentialProfile& profile, const Domain& domain,
                                         int seeds_per_axis = 16);

/// Sum of sqrt|lambda_j|.
double kappa_of(const std::vector<double>& hess_eigenvalues);

enum class EdgeClass { Perpendicular, Parallel, Oblique, Mixed };

struct EdgeSample {
  double x = 0.0;
  double y = 0.0;
  double grad_norm = 0.0;
  EdgeClass cls = EdgeClass::Oblique;
};

struct EdgeRecord {
  std::string name;  // left, right, bottom, top
  EdgeClass cls = EdgeClass::Mixed;
  std::vector<EdgeSample> samples;
};

struct BoundaryData {
  // 1D
  double grad_at_lo = 0.0;
  double grad_at_hi = 0.0;
  double J = 0.0;
  // 2D
  std::vector<EdgeRecord> edges;
  /// min |grad V| over perpendicular samples; absent when no edge point is perpendicular.
  /// In 1D both endpoints are perpendicular and J_m = J.
  std::optional<double> J_m;
};

/// Throws RegimeError when |grad V| vanishes (below 1e-10) at a sampled boundary point.
BoundaryData boundary_data(const PotentialProfile& profile, const Domain& domain,
                           int samples_per_edge = 64);

enum class Regime { NoCriticalPoint, Morse };

struct PredictedAsymptote {
  Regime regime = Regime::NoCriticalPoint;
  double h_exponent = 2.0 / 3.0;
  double prefactor = 0.0;
  double imag_center = 0.0;
  /// 2D without critical points: only a lower bound is known (infinite when no edge is
  /// perpendicular).
  bool lower_bound_only = false;
  std::vector<std::string> warnings;
};

enum class RegimeChoice { Auto, Airy, Morse };

PredictedAsymptote predicted_limit(const PotentialProfile& profile, const Domain& domain,
                                   RegimeChoice choice = RegimeChoice::Auto);

std::string to_string(Regime r);
std::string to_string(EdgeClass c);

}  // namespace semispec
