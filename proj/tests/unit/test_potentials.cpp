#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "semispec/error.hpp"
#include "semispec/models.hpp"
#include "semispec/potentials.hpp"

using namespace semispec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("critical points of the reference potentials", "[potentials]") {
  SECTION("x^2 on (-1, 2)") {
    const auto s = find_critical_points(PotentialProfile::parse("x^2", 1), Interval{-1, 2});
    REQUIRE(s.interior.size() == 1);
    CHECK_THAT(s.interior[0].location[0], WithinAbs(0.0, 1e-12));
    REQUIRE(s.interior[0].hess_eigenvalues.size() == 1);
    CHECK_THAT(s.interior[0].hess_eigenvalues[0], WithinAbs(2.0, 1e-14));
    CHECK_THAT(s.interior[0].kappa, WithinAbs(1.41421356, 1e-8));
    CHECK_FALSE(s.interior[0].degenerate);
    CHECK(s.near_boundary.empty());
  }
  SECTION("x on (0, 1)") {
    const auto s = find_critical_points(PotentialProfile::parse("x", 1), Interval{0, 1});
    CHECK(s.interior.empty());
    CHECK(s.near_boundary.empty());
    CHECK(s.flagged_cells.empty());
  }
  SECTION("x^2 + 2y^2 on (-1, 1)^2") {
    const auto s = find_critical_points(PotentialProfile::parse("x^2 + 2*y^2", 2), Rectangle{{-1, 1}, {-1, 1}});
    REQUIRE(s.interior.size() == 1);
    CHECK_THAT(s.interior[0].location[0], WithinAbs(0.0, 1e-12));
    CHECK_THAT(s.interior[0].location[1], WithinAbs(0.0, 1e-12));
    CHECK_THAT(s.interior[0].hess_eigenvalues[0], WithinAbs(2.0, 1e-14));
    CHECK_THAT(s.interior[0].hess_eigenvalues[1], WithinAbs(4.0, 1e-14));
    CHECK_THAT(s.interior[0].kappa, WithinAbs(3.41421356, 1e-8));
  }
  SECTION("double well, boundary and degenerate cases") {
    const auto dw = find_critical_points(PotentialProfile::parse("x^4 - 2*x^2", 1), Interval{-2, 2.5});
    CHECK(dw.interior.size() == 3);
    const auto edge = find_critical_points(PotentialProfile::parse("x^2", 1), Interval{0, 1});
    CHECK(edge.interior.empty());
    CHECK(edge.near_boundary.size() == 1);
    const auto deg = find_critical_points(PotentialProfile::parse("x^3", 1), Interval{-1, 1});
    REQUIRE(deg.interior.size() == 1);
    CHECK(deg.interior[0].degenerate);
  }
  CHECK_THROWS_AS(find_critical_points(PotentialProfile::parse("x", 1), Interval{0, 1}, 4), ConfigError);
}

TEST_CASE("critical points satisfy the gradient bound", "[potentials][property]") {
  const std::vector<std::pair<std::string, Domain>> cases{
      {"x^4 - 2*x^2 + 0.3*x", Interval{-2, 2}},
      {"(x - 0.3)^2 + 3*(y + 0.2)^2 + x*y", Rectangle{{-1, 1}, {-1, 1}}},
      {"x^2 - y^2", Rectangle{{-1, 2}, {-2, 1}}},
  };
  for (const auto& [text, domain] : cases) {
    const auto p = PotentialProfile::parse(text, domain_dim(domain));
    const auto s = find_critical_points(p, domain);
    REQUIRE_FALSE(s.interior.empty());
    for (const auto& c : s.interior) {
      const double x = c.location[0], y = c.location.size() > 1 ? c.location[1] : 0.0;
      const auto g = p.gradient(x, y);
      const auto H = p.hessian(x, y);
      double hn = 0;
      for (const auto& row : H)
        for (double v : row) hn = std::max(hn, std::abs(v));
      CHECK(std::hypot(g[0], g[1]) <= 1e-10 * (1.0 + hn * std::hypot(x, y)));
    }
  }
}

TEST_CASE("Hessian is symmetric", "[potentials][property]") {
  const auto p = PotentialProfile::parse("x^3*y - 2*x*y^2 + y^4/3", 2);
  for (double x : {-1.0, -0.2, 0.7})
    for (double y : {-0.5, 0.1, 1.3}) {
      const auto H = p.hessian(x, y);
      CHECK(H[0][1] == H[1][0]);
    }
}

TEST_CASE("kappa_of", "[potentials]") {
  CHECK_THAT(kappa_of({2.0}), WithinAbs(1.414214, 1e-6));
  CHECK_THAT(kappa_of({2.0, 4.0}), WithinAbs(3.414214, 1e-6));
  CHECK(kappa_of({1.0}) == 1.0);
  CHECK(kappa_of({-4.0}) == 2.0);
  CHECK_THROWS_AS(kappa_of({}), ConfigError);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0), ut(0.1, 3.0);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> l{u(rng), u(rng), u(rng)};
    const double k = kappa_of(l);
    auto perm = l;
    std::reverse(perm.begin(), perm.end());
    CHECK_THAT(kappa_of(perm), WithinRel(k, 1e-15));
    const double t = ut(rng);
    std::vector<double> scaled;
    for (double v : l) scaled.push_back(t * t * v);
    CHECK_THAT(kappa_of(scaled), WithinRel(t * k, 1e-13));
  }
}

TEST_CASE("boundary data", "[potentials]") {
  const auto a = boundary_data(PotentialProfile::parse("x", 1), Interval{0, 1});
  CHECK(a.J == 1.0);
  REQUIRE(a.J_m);
  CHECK(*a.J_m == 1.0);
  const auto b = boundary_data(PotentialProfile::parse("x^2", 1), Interval{-1, 2});
  CHECK(b.grad_at_lo == 2.0);
  CHECK(b.grad_at_hi == 4.0);
  CHECK(b.J == 2.0);
  CHECK_THROWS_AS(boundary_data(PotentialProfile::parse("x^2", 1), Interval{0, 1}), RegimeError);

  const auto r = boundary_data(PotentialProfile::parse("x", 2), Rectangle{{0, 1}, {0, 1}});
  REQUIRE(r.edges.size() == 4);
  for (const auto& e : r.edges) {
    if (e.name == "left" || e.name == "right") CHECK(e.cls == EdgeClass::Perpendicular);
    if (e.name == "bottom" || e.name == "top") CHECK(e.cls == EdgeClass::Parallel);
  }
  REQUIRE(r.J_m);
  CHECK_THAT(*r.J_m, WithinAbs(1.0, 1e-15));

  const auto o = boundary_data(PotentialProfile::parse("x + y", 2), Rectangle{{0, 1}, {0, 1}});
  CHECK_FALSE(o.J_m.has_value());
  for (const auto& e : o.edges) CHECK(e.cls == EdgeClass::Oblique);
}

TEST_CASE("predicted asymptotes", "[potentials]") {
  const auto a = predicted_limit(PotentialProfile::parse("x", 1), Interval{0, 1});
  CHECK(a.regime == Regime::NoCriticalPoint);
  CHECK_THAT(a.h_exponent, WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(a.prefactor, WithinAbs(1.169054, 1e-6));

  const auto m = predicted_limit(PotentialProfile::parse("x^2", 1), Interval{-1, 2});
  CHECK(m.regime == Regime::Morse);
  CHECK(m.h_exponent == 1.0);
  CHECK_THAT(m.prefactor, WithinAbs(0.707107, 1e-6));
  CHECK_THAT(m.imag_center, WithinAbs(0.0, 1e-15));

  const auto t = predicted_limit(PotentialProfile::parse("x^2 + 2*y^2", 2), Rectangle{{-1, 1}, {-1, 1}});
  CHECK(t.regime == Regime::Morse);
  CHECK_THAT(t.prefactor, WithinAbs(1.707107, 1e-6));

  const auto shifted = predicted_limit(PotentialProfile::parse("(x - 0.5)^2 + 3", 1), Interval{-1, 2});
  CHECK_THAT(shifted.imag_center, WithinAbs(3.0, 1e-12));

  const auto well = predicted_limit(PotentialProfile::parse("x^4 - 2*x^2", 1), Interval{-2, 2.5});
  CHECK_THAT(well.prefactor, WithinAbs(1.0, 1e-12));
  CHECK_THAT(well.imag_center, WithinAbs(0.0, 1e-12));
  CHECK(well.warnings.empty());

  CHECK_THROWS_AS(predicted_limit(PotentialProfile::parse("x^3", 1), Interval{-1, 1}), RegimeError);
  CHECK_THROWS_AS(predicted_limit(PotentialProfile::parse("x^2", 1), Interval{0, 1}), RegimeError);
  CHECK_THROWS_AS(predicted_limit(PotentialProfile::parse("x^2", 1), Interval{-1, 2}, RegimeChoice::Airy),
                  RegimeError);
}

TEST_CASE("no-critical-point prefactor scales as J^(2/3)", "[potentials][property]") {
  for (const char* v : {"x", "3*x + 1", "x^2 + 2*x"}) {
    const auto p1 = predicted_limit(PotentialProfile::parse(v, 1), Interval{0.5, 1.5});
    const auto p2 = predicted_limit(PotentialProfile::parse(std::string("2*(") + v + ")", 1), Interval{0.5, 1.5});
    CHECK_THAT(p2.prefactor / p1.prefactor, WithinRel(std::cbrt(4.0), 1e-14));
  }
}
