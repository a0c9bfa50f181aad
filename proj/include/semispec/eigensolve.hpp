#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "semispec/discretize.hpp"

namespace semispec {

enum class SpectrumMethod { Dense, ShiftInvert };

struct SpectrumResult {
  std::vector<Complex> eigenvalues;
  std::vector<double> residuals;  // ||A v - lambda v|| / ||v||, one per eigenvalue
  SpectrumMethod method = SpectrumMethod::Dense;
  std::vector<Complex> shifts;    // ShiftInvert only
  double tolerance = 0.0;         // declared residual bound
  std::string grid_id;
  bool empty_flagged = false;     // shift-invert found no residual-passing pair

  std::size_t size() const { return eigenvalues.size(); }
};

struct ShiftPlan {
  std::vector<Complex> shifts;
  int k_per_shift = 6;
  double tol = 1e-8;        // residual bound for accepted pairs
  int max_iterations = 300; // Krylov-Schur restarts per shift
  unsigned threads = 1;
};

inline constexpr Eigen::Index kDefaultDenseCap = 3000;

/// All eigenvalues via LAPACK zgeev, residuals checked against the sparse matrix.
SpectrumResult dense_spectrum(const AssembledOperator& op, Eigen::Index dense_cap = kDefaultDenseCap);

/// Shifts i*q at the {0, 25, 50, 75, 100} percentiles of V over the grid nodes.
ShiftPlan default_shift_plan(const AssembledOperator& op);

/// Shift-invert Krylov-Schur per shift; Ritz values mapped back, pairs whose true
/// residual exceeds plan.tol dropped, union deduplicated (smaller residual wins).
/// Results are sorted by (Re, Im).
SpectrumResult shift_invert_leftmost(const AssembledOperator& op, const ShiftPlan& plan);

/// Minimal real part; ties (within 1e-10 relative) go to smaller |Im|, then smaller Im.
Complex leftmost(const SpectrumResult& spec);
std::size_t leftmost_index(const SpectrumResult& spec);

enum class SolverMethod { Auto, Dense, ShiftInvert };

struct SolverOptions {
  SolverMethod method = SolverMethod::Auto;
  Eigen::Index dense_cap = kDefaultDenseCap;
  /// Auto picks the dense path at or below this size.
  Eigen::Index auto_dense_below = 400;
  int k_per_shift = 6;
  double tol = 1e-8;
  int max_iterations = 300;
  std::vector<Complex> extra_shifts;
  std::vector<Complex> shifts_override;
  unsigned threads = 1;
};

SpectrumResult compute_spectrum(const AssembledOperator& op, const SolverOptions& opts);

using OperatorBuilder = std::function<AssembledOperator(int level)>;
using SpectrumSolver = std::function<SpectrumResult(const AssembledOperator&)>;

/// Default match tolerance 1e-4 (1 + |lambda|).
double default_match_tol(Complex lambda);

/// Builds levels 0..levels-1 (builder(l) should refine by 2^l), keeps the finest-level
/// eigenvalues that have a partner within match_tol at every coarser level.
/// Throws InstabilityError when the leftmost eigenvalue moves by more than match_tol.
SpectrumResult refine_filter(const OperatorBuilder& builder, const SpectrumSolver& solver, int levels,
                             const std::function<double(Complex)>& match_tol = default_match_tol);

}  // namespace semispec
