#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/SVD>
#include <Eigen/Eigenvalues>

#include "semispec/discretize.hpp"
#include "semispec/eigensolve.hpp"
#include "semispec/error.hpp"

using namespace semispec;
using Catch::Matchers::WithinAbs;

namespace {

SpectrumResult from_list(std::vector<Complex> ev) {
  SpectrumResult s;
  s.eigenvalues = std::move(ev);
  s.residuals.assign(s.eigenvalues.size(), 0.0);
  return s;
}

AssembledOperator oscillator(int n) { return assemble_model(Oscillator{1.0, 12.0}, n); }

ShiftPlan plan_at(std::vector<Complex> shifts, int k = 6) {
  ShiftPlan p;
  p.shifts = std::move(shifts);
  p.k_per_shift = k;
  return p;
}

double sigma_min(const Eigen::MatrixXcd& m) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().minCoeff();
}

}  // namespace

TEST_CASE("dense spectra of small matrices", "[eigensolve]") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = Complex(1, 2);
  d(1, 1) = 3.0;
  const auto s = dense_spectrum(make_matrix_operator(d));
  REQUIRE(s.size() == 2);
  CHECK(std::abs(s.eigenvalues[0] - Complex(1, 2)) < 1e-15);
  CHECK(std::abs(s.eigenvalues[1] - Complex(3, 0)) < 1e-15);
  CHECK(s.residuals[0] <= 1e-15);
  CHECK(s.method == SpectrumMethod::Dense);

  Eigen::MatrixXcd r(2, 2);
  r << 0, 1, -1, 0;
  const auto rot = dense_spectrum(make_matrix_operator(r));
  REQUIRE(rot.size() == 2);
  const bool lower_first = rot.eigenvalues[0].imag() < 0;
  CHECK(std::abs(rot.eigenvalues[lower_first ? 0 : 1] - Complex(0, -1)) < 1e-14);
  CHECK(std::abs(rot.eigenvalues[lower_first ? 1 : 0] - Complex(0, 1)) < 1e-14);

  const auto dav = leftmost(dense_spectrum(oscillator(400)));
  CHECK(std::abs(dav - Complex(0.70710678, 0.70710678)) < 1e-2);

  CHECK_THROWS_AS(dense_spectrum(oscillator(50), 40), ConfigError);
}

TEST_CASE("shift-invert agrees with the dense solver", "[eigensolve]") {
  const auto op = oscillator(400);
  const auto dense = leftmost(dense_spectrum(op));
  const auto si = shift_invert_leftmost(op, plan_at({Complex(0, 0)}));
  CHECK(si.method == SpectrumMethod::ShiftInvert);
  CHECK(std::abs(leftmost(si) - dense) <= 1e-8);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = Complex(2, 1);
  const auto both = shift_invert_leftmost(make_matrix_operator(d), plan_at({Complex(0, 0)}, 2));
  REQUIRE(both.size() == 2);
  CHECK(std::abs(both.eigenvalues[0] - 1.0) < 1e-12);
  CHECK(std::abs(both.eigenvalues[1] - Complex(2, 1)) < 1e-12);

  const auto airy = assemble(grid_for(0.01, Interval{0, 1}, {ResolutionRegime::Airy, 10}),
                             PotentialProfile::parse("x", 1), 0.01);
  const auto plan = default_shift_plan(airy);
  REQUIRE(plan.shifts.size() == 5);
  for (const auto& s : plan.shifts) CHECK(s.real() == 0.0);
  const auto full = dense_spectrum(airy);
  const auto part = shift_invert_leftmost(airy, plan);
  CHECK(std::abs(leftmost(part).real() - leftmost(full).real()) <= 1e-8);
  double lo = 1e300, hi = -1e300;
  for (const auto& e : part.eigenvalues) {
    lo = std::min(lo, e.imag());
    hi = std::max(hi, e.imag());
  }
  CHECK(lo < 0.2);
  CHECK(hi > 0.8);

  CHECK_THROWS_AS(shift_invert_leftmost(airy, plan_at({Complex(-1, 0)})), ConfigError);
}

TEST_CASE("leftmost tie-breaking", "[eigensolve]") {
  CHECK(leftmost(from_list({Complex(1, 1), 2.0})) == Complex(1, 1));
  CHECK(leftmost(from_list({Complex(1, 2), Complex(1, -2)})) == Complex(1, -2));
  CHECK(leftmost(from_list({Complex(1, 2), Complex(1, 0.5)})) == Complex(1, 0.5));
  CHECK(leftmost(from_list({3.0})) == Complex(3, 0));
  CHECK_THROWS_AS(leftmost(from_list({})), NumericalError);
}

TEST_CASE("refinement filter", "[eigensolve]") {
  const SpectrumSolver dense = [](const AssembledOperator& op) { return dense_spectrum(op); };

  const auto profile = PotentialProfile::parse("x", 1);
  const OperatorBuilder coarse = [&](int level) {
    return assemble(make_grid(Interval{0, 1}, 20 << level), profile, 0.001);
  };
  CHECK_THROWS_AS(refine_filter(coarse, dense, 2), InstabilityError);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d.diagonal() << Complex(1, 1), Complex(2, 0), Complex(0.5, -3);
  const OperatorBuilder same = [&](int) { return make_matrix_operator(d); };
  const auto kept = refine_filter(same, dense, 3);
  CHECK(kept.size() == 3);

  const SpectrumSolver si = [](const AssembledOperator& op) { return shift_invert_leftmost(op, plan_at({Complex(0, 0)})); };
  const OperatorBuilder dav = [](int level) { return oscillator(1000 * (1 << level) + (1 << level) - 1); };
  const auto stable = refine_filter(dav, si, 2);
  CHECK(std::abs(leftmost(stable) - Complex(0.70710678, 0.70710678)) < 1e-4);
  CHECK(stable.size() >= 3);
  CHECK_THROWS_AS(refine_filter(dav, si, 1), ConfigError);
}

TEST_CASE("spectral properties of assembled operators", "[eigensolve][property]") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), hs(0.03, 0.2);
  std::uniform_int_distribution<int> ns(60, 300);
  for (int trial = 0; trial < 6; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.3f*x^3 + %.3f*x^2 + %.3f*x", a, b, c);
    const auto grid = make_grid(Interval{-1, 1.5}, ns(rng));
    const double h = hs(rng);
    const auto op = assemble(grid, PotentialProfile::parse(buf, 1), h);
    const auto dense = dense_spectrum(op);

    // numerical range box of L + iD
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(op.laplacian_part())};
    const double lmin = es.eigenvalues().minCoeff();
    const Eigen::VectorXd v = op.potential_diagonal();
    for (std::size_t k = 0; k < dense.size(); ++k) {
      const auto e = dense.eigenvalues[k];
      const double r = dense.residuals[k] + 1e-10;
      CHECK(e.real() >= lmin - r);
      CHECK(e.imag() >= v.minCoeff() - r);
      CHECK(e.imag() <= v.maxCoeff() + r);
    }

    // conjugation and shift invariance
    std::snprintf(buf, sizeof buf, "-(%.3f*x^3 + %.3f*x^2 + %.3f*x)", a, b, c);
    const auto neg = assemble(grid, PotentialProfile::parse(buf, 1), h);
    CHECK(std::abs(leftmost(dense_spectrum(neg)) - std::conj(leftmost(dense))) < 1e-9);
    std::snprintf(buf, sizeof buf, "%.3f*x^3 + %.3f*x^2 + %.3f*x + 1.25", a, b, c);
    const auto up = assemble(grid, PotentialProfile::parse(buf, 1), h);
    CHECK(std::abs(leftmost(dense_spectrum(up)) - (leftmost(dense) + Complex(0, 1.25))) < 1e-9);

    // oracle equivalence and the residual contract
    auto plan = default_shift_plan(op);
    const auto si = shift_invert_leftmost(op, plan);
    REQUIRE_FALSE(si.empty_flagged);
    CHECK(std::abs(leftmost(si) - leftmost(dense)) <= 1e-8);
    const Eigen::MatrixXcd A = op.dense();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(A.rows(), A.cols());
    for (std::size_t k = 0; k < si.size(); ++k) {
      CHECK(si.residuals[k] <= plan.tol);
      CHECK(sigma_min(A - si.eigenvalues[k] * I) <= plan.tol);
    }
  }
}

TEST_CASE("second-order convergence on the oscillator", "[eigensolve][property]") {
  const auto plan = plan_at({Complex(0, 0)});
  Complex l[3];
  int n = 199;
  for (auto& v : l) {
    v = leftmost(shift_invert_leftmost(oscillator(n), plan));
    n = 2 * n + 1;
  }
  const double ratio = std::abs(l[0] - l[1]) / std::abs(l[1] - l[2]);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("compute_spectrum dispatch", "[eigensolve]") {
  const auto op = oscillator(100);
  SolverOptions opts;
  CHECK(compute_spectrum(op, opts).method == SpectrumMethod::Dense);
  opts.method = SolverMethod::ShiftInvert;
  const auto si = compute_spectrum(op, opts);
  CHECK(si.method == SpectrumMethod::ShiftInvert);
  CHECK(std::abs(leftmost(si) - leftmost(dense_spectrum(op))) <= 1e-8);
}
