#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "semispec/discretize.hpp"
#include "semispec/eigensolve.hpp"
#include "semispec/error.hpp"

using namespace semispec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("grid_for resolution rule", "[discretize]") {
  const auto a = grid_for(0.01, Interval{0, 1}, {ResolutionRegime::Airy, 10});
  CHECK(a.axes[0].n >= 215);
  CHECK(a.axes[0].spacing() <= std::pow(0.01, 2.0 / 3.0) / 10);
  CHECK(a.axes[0].n == 215);

  const auto m = grid_for(0.01, Interval{-1, 2}, {ResolutionRegime::Morse, 10});
  CHECK(m.axes[0].n >= 299);
  CHECK(m.axes[0].spacing() <= 0.01 + 1e-15);

  try {
    grid_for(1e-6, Interval{0, 1}, {ResolutionRegime::Airy, 10});
    FAIL("expected infeasible resolution");
  } catch (const InfeasibleResolution& e) {
    const double hmin = e.smallest_feasible_h();
    CHECK(hmin > 1e-6);
    CHECK(grid_for(hmin, Interval{0, 1}, {ResolutionRegime::Airy, 10}).size() <= kDefaultNMax1D);
  }

  const auto r = grid_for(0.05, Rectangle{{-1, 1}, {-1, 1}}, {ResolutionRegime::Morse, 10});
  CHECK(r.dim == 2);
  CHECK(r.size() == static_cast<std::size_t>(r.axes[0].n) * r.axes[1].n);
  CHECK(r.axes[0].spacing() <= std::sqrt(0.05) / 10);
  CHECK_THROWS_AS(grid_for(0.0, Interval{0, 1}, {}), ConfigError);

  const double hs = smallest_feasible_h(Interval{0, 1}, {ResolutionRegime::Airy, 10}, 1000);
  CHECK(grid_for(hs, Interval{0, 1}, {ResolutionRegime::Airy, 10}, 1000).size() <= 1000);
  CHECK_THROWS_AS(grid_for(hs * 0.99, Interval{0, 1}, {ResolutionRegime::Airy, 10}, 1000), InfeasibleResolution);
}

TEST_CASE("interval assembly stencil", "[discretize]") {
  const auto zero = PotentialProfile::parse("0", 1);
  const auto op = assemble_interval(make_grid(Interval{0, 1}, 2), zero, 1.0);
  const Eigen::MatrixXcd d = op.dense();
  CHECK_THAT(d(0, 0).real(), WithinAbs(18.0, 1e-12));
  CHECK_THAT(d(0, 1).real(), WithinAbs(-9.0, 1e-12));
  CHECK_THAT(d(1, 0).real(), WithinAbs(-9.0, 1e-12));
  CHECK_THAT(d(1, 1).real(), WithinAbs(18.0, 1e-12));
  CHECK(d.imag().isZero());

  const auto g = make_grid(Interval{-1, 2}, 40);
  const auto base = assemble_interval(g, PotentialProfile::parse("x^2 - x", 1), 0.1);
  const auto shifted = assemble_interval(g, PotentialProfile::parse("x^2 - x + 2.5", 1), 0.1);
  const Eigen::MatrixXcd diff = shifted.dense() - base.dense();
  CHECK((diff - Complex(0, 2.5) * Eigen::MatrixXcd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-14);

  const auto lin = assemble_interval(make_grid(Interval{0, 1}, 3), PotentialProfile::parse("x", 1), 1.0);
  const Eigen::VectorXd v = lin.potential_diagonal();
  CHECK(v(0) == 0.25);
  CHECK(v(1) == 0.5);
  CHECK(v(2) == 0.75);
  CHECK(lin.rows() == 3);
}

TEST_CASE("rectangle assembly stencil", "[discretize]") {
  const auto op = assemble_rectangle(make_grid(Rectangle{{0, 1}, {0, 1}}, 1, 1), PotentialProfile::parse("0", 2), 1.0);
  REQUIRE(op.rows() == 1);
  CHECK_THAT(op.dense()(0, 0).real(), WithinAbs(2 / 0.25 + 2 / 0.25, 1e-12));

  const auto g = make_grid(Rectangle{{0, 1}, {0, 2}}, 5, 4);
  const auto lin = assemble_rectangle(g, PotentialProfile::parse("x", 2), 0.3);
  const Eigen::VectorXd d = lin.potential_diagonal();
  for (int j = 1; j < 4; ++j) CHECK(d.segment(j * 5, 5) == d.segment(0, 5));

  const auto sg = make_grid(Rectangle{{-1, 1}, {-1, 1}}, 7, 6);
  const Eigen::VectorXd q = assemble_rectangle(sg, PotentialProfile::parse("x^2 + 2*y^2", 2), 0.1).potential_diagonal();
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < 7; ++i) CHECK_THAT(q(j * 7 + i), WithinAbs(q(j * 7 + (6 - i)), 1e-15));

  const auto lap = lin.laplacian_part();
  const double dx = g.axes[0].spacing(), dy = g.axes[1].spacing();
  CHECK_THAT(lap.coeff(6, 6), WithinRel(0.09 * (2 / (dx * dx) + 2 / (dy * dy)), 1e-14));
  CHECK_THAT(lap.coeff(6, 7), WithinRel(-0.09 / (dx * dx), 1e-14));
  CHECK_THAT(lap.coeff(6, 11), WithinRel(-0.09 / (dy * dy), 1e-14));
  CHECK(lap.coeff(4, 5) == 0.0);
}

TEST_CASE("assembled operators split as L + iD", "[discretize][property]") {
  const auto check = [](const AssembledOperator& op) {
    const Eigen::MatrixXd L = Eigen::MatrixXd(op.laplacian_part());
    CHECK((L - L.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    const Eigen::MatrixXcd rebuilt = L.cast<Complex>() + Complex(0, 1) * op.potential_diagonal().cast<Complex>().asDiagonal().toDenseMatrix();
    CHECK((rebuilt - op.dense()).cwiseAbs().maxCoeff() == 0.0);
  };
  check(assemble(make_grid(Interval{-1, 2}, 60), PotentialProfile::parse("x^3 - x", 1), 0.05));
  check(assemble(make_grid(Rectangle{{-1, 1}, {0, 2}}, 9, 7), PotentialProfile::parse("x*y + y^2", 2), 0.2));

  const auto g = make_grid(Rectangle{{-1, 1}, {0, 2}}, 9, 7);
  const auto p = assemble(g, PotentialProfile::parse("x*y + y^2", 2), 0.2);
  const auto n = assemble(g, PotentialProfile::parse("-(x*y + y^2)", 2), 0.2);
  CHECK((n.dense() - p.dense().conjugate()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model assembly", "[discretize]") {
  const int nx = 6, ny = 5;
  const auto hp = assemble_model(HalfPlane{1.0, 0.0, 4.0, 3.0}, nx, ny);
  REQUIRE(hp.model_tag);
  const auto gx = make_grid(Interval{-2, 2}, nx);
  const auto gy = make_grid(Interval{0, 3}, ny);
  const Eigen::MatrixXcd Ax = assemble_interval(gx, PotentialProfile::parse("0", 1), 1.0).dense();
  const Eigen::MatrixXcd Ay = assemble_interval(gy, PotentialProfile::parse("x", 1), 1.0).dense();
  // index j * nx + i: kron(I_y, A_x) + kron(A_y, I_x)
  Eigen::MatrixXcd kron = Eigen::MatrixXcd::Zero(nx * ny, nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int jj = 0; jj < ny; ++jj)
      for (int i = 0; i < nx; ++i)
        for (int ii = 0; ii < nx; ++ii) {
          Complex v = (j == jj ? Ax(i, ii) : Complex(0)) + (i == ii ? Ay(j, jj) : Complex(0));
          kron(j * nx + i, jj * nx + ii) = v;
        }
  CHECK((hp.dense() - kron).cwiseAbs().maxCoeff() < 1e-12);

  const auto osc = assemble_model(Oscillator{2.0, 3.0}, 11);
  CHECK(osc.grid.axes[0].lo == -3.0);
  CHECK_THAT(osc.potential_diagonal()(5), WithinAbs(0.0, 1e-15));
  CHECK_THAT(osc.potential_diagonal()(0), WithinRel(2.0 * 2.5 * 2.5, 1e-14));
  CHECK_THROWS_AS(assemble_model(HalfLineAiry{1.0, -1.0}, 10), ConfigError);
}

TEST_CASE("half-line Airy truncation is stable", "[discretize][property]") {
  // Same spacing at L = 30 and L = 37.5.
  SolverOptions opts;
  opts.method = SolverMethod::ShiftInvert;
  opts.shifts_override = {Complex(0, 0)};
  const auto short_box = leftmost(compute_spectrum(assemble_model(HalfLineAiry{1.0, 30.0}, 1999), opts));
  const auto long_box = leftmost(compute_spectrum(assemble_model(HalfLineAiry{1.0, 37.5}, 2499), opts));
  CHECK(std::abs(short_box - long_box) <= 1e-6);
  CHECK(std::abs(short_box - Complex(1.169054, 2.024860)) <= 1e-3);
}

TEST_CASE("matrix dump", "[discretize]") {
  const auto op = assemble_interval(make_grid(Interval{0, 1}, 3), PotentialProfile::parse("x", 1), 1.0);
  std::ostringstream os;
  write_matrix_market(os, op);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "%%MatrixMarket-compatible");
  int rows = 0, cols = 0, nnz = 0;
  is >> rows >> cols >> nnz;
  CHECK(rows == 3);
  CHECK(cols == 3);
  CHECK(nnz == 7);
  int r = 0, c = 0;
  double re = 0, im = 0;
  is >> r >> c >> re >> im;
  CHECK(r == 1);
  CHECK(c == 1);
  CHECK(re == 32.0);
  CHECK(im == 0.25);
  CHECK(op.id() == assemble_interval(make_grid(Interval{0, 1}, 3), PotentialProfile::parse("x", 1), 1.0).id());
}
