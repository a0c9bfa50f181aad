#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "semispec/discretize.hpp"
#include "semispec/eigensolve.hpp"
#include "semispec/models.hpp"
#include "semispec/pseudospec.hpp"

using namespace semispec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

AssembledOperator diag_op(std::vector<Complex> d) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return make_matrix_operator(m);
}

// Smallest singular value of a 2x2 matrix from the trace and determinant of M*M.
double sigma_min_2x2(Complex a, Complex b, Complex c, Complex d) {
  const double t = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
  const double det = std::norm(a * d - b * c);
  return std::sqrt(2.0 * det / (t + std::sqrt(t * t - 4.0 * det)));
}

double distance_to(const std::vector<Complex>& spectrum, Complex z) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& e : spectrum) d = std::min(d, std::abs(z - e));
  return d;
}

}  // namespace

TEST_CASE("resolvent norm of small matrices", "[pseudospec]") {
  CHECK_THAT(resolvent_norm(diag_op({1.0, 2.0}), 0.0).norm, WithinRel(1.0, 1e-14));

  Eigen::MatrixXcd j(2, 2);
  j << 1, 1000, 0, 1;
  const auto s = resolvent_norm(make_matrix_operator(j), 0.0);
  CHECK(s.method == ResolventMethod::DenseSVD);
  CHECK_THAT(s.norm, WithinRel(1.0 / sigma_min_2x2(1, 1000, 0, 1), 1e-10));
  CHECK(s.norm > 999.0);
  const Complex z(0.3, -0.2);
  CHECK_THAT(resolvent_norm(make_matrix_operator(j), z).norm,
             WithinRel(1.0 / sigma_min_2x2(1.0 - z, 1000, 0, 1.0 - z), 1e-10));

  CHECK_THROWS_AS(resolvent_norm(diag_op({1.0, Complex(2, 1)}), Complex(2, 1)), SingularShift);
  ResolventOptions sparse;
  sparse.dense_below = 0;
  CHECK_THROWS_AS(resolvent_norm(diag_op({1.0, Complex(2, 1)}), Complex(2, 1), sparse), SingularShift);
}

TEST_CASE("strip suprema", "[pseudospec]") {
  const auto normal = diag_op({Complex(0, 1), Complex(1, 1)});
  StripOptions line_only;
  line_only.enforce_strip = false;
  const auto r = strip_sup(normal, 0.5, line_only);
  CHECK_THAT(r.sup, WithinRel(2.0, 1e-10));
  CHECK_THAT(r.argmax_nu, WithinAbs(1.0, 1e-9));
  CHECK(r.samples.size() == 201);

  try {
    strip_sup(normal, 0.5);
    FAIL("expected a strip violation");
  } catch (const StripViolation& e) {
    REQUIRE(e.offending().size() == 1);
    CHECK(e.offending()[0] == Complex(0, 1));
  }
  CHECK_THROWS_AS(strip_sup(normal, 1.2), StripViolation);

  const double h = 0.05;
  const auto op = assemble(grid_for(h, Interval{0, 1}, {ResolutionRegime::Airy, 10}), PotentialProfile::parse("x", 1), h);
  const double gamma = 0.5 * (std::abs(airy_mu1()) / 2.0) * std::pow(h, 2.0 / 3.0);
  const auto airy = strip_sup(op, gamma);
  CHECK(std::isfinite(airy.sup));
  CHECK(airy.sup >= 1.0 / (halfline_airy_spectrum(1.0, 1).min_real * std::pow(h, 2.0 / 3.0) - gamma) - 1e-6);
}

TEST_CASE("pseudospectrum fields", "[pseudospec]") {
  const auto normal = diag_op({Complex(0, 1), Complex(1, 1)});
  const auto f = field(normal, Region{2.0, 3.0, 2.0, 3.0}, 2, 2);
  CHECK(f.samples.size() == 4);
  CHECK(f.samples.allFinite());

  const auto op = assemble_model(Oscillator{1.0, 12.0}, 200);
  const auto spec = dense_spectrum(op);
  const Complex lam = leftmost(spec);
  const Region reg{0.5, 0.9, 0.5, 0.9};
  const auto dav = field(op, reg, 21, 21);
  Eigen::Index jm = 0, im = 0;
  dav.samples.maxCoeff(&jm, &im);
  const int i0 = static_cast<int>(std::lround((lam.real() - reg.re_lo) / 0.02));
  const int j0 = static_cast<int>(std::lround((lam.imag() - reg.im_lo) / 0.02));
  CHECK(im == i0);
  CHECK(jm == j0);
  CHECK(std::abs(dav.point(i0, j0) - lam) < 0.015);

  std::size_t prev = 0;
  for (double eps : {1e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0}) {
    const auto c = dav.count_at_least(eps);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(prev == dav.samples.size());

  const auto hit = field(diag_op({Complex(0, 0), Complex(1, 0)}), Region{0.0, 1.0, 0.0, 1.0}, 2, 2);
  CHECK(std::isinf(hit.samples(0, 0)));
  CHECK(std::isinf(hit.samples(0, 1)));
  CHECK(std::isfinite(hit.samples(1, 0)));

  std::ostringstream os;
  write_field_csv(os, f);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "re,im,resolvent_norm");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("resolvent norm properties", "[pseudospec][property]") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> re(-0.5, 3.0), im(-1.0, 4.0);

  const auto op = assemble(make_grid(Interval{-1, 2}, 150), PotentialProfile::parse("x^2", 1), 0.1);
  const auto spec = dense_spectrum(op);
  ResolventOptions sparse;
  sparse.dense_below = 0;
  for (int k = 0; k < 20; ++k) {
    const Complex z(re(rng), im(rng));
    const auto d = resolvent_norm(op, z);
    CHECK(d.norm >= 1.0 / distance_to(spec.eigenvalues, z) - 1e-8);
    const auto s = resolvent_norm(op, z, sparse);
    CHECK(s.method == ResolventMethod::IterativeSmallestSingular);
    CHECK_THAT(s.norm, WithinRel(d.norm, 1e-8));
  }

  const auto lap = assemble(make_grid(Interval{0, 1}, 120), PotentialProfile::parse("0", 1), 0.2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(lap.laplacian_part())};
  std::vector<Complex> sigma;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) sigma.emplace_back(es.eigenvalues()(i), 0.0);
  for (int k = 0; k < 20; ++k) {
    const Complex z(re(rng), im(rng));
    const double oracle = 1.0 / distance_to(sigma, z);
    CHECK_THAT(resolvent_norm(lap, z).norm, WithinRel(oracle, 1e-8));
    CHECK_THAT(resolvent_norm(lap, z, sparse).norm, WithinRel(oracle, 1e-8));
  }
}
