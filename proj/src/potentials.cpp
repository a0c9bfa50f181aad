#include "semispec/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semispec/error.hpp"
#include "semispec/models.hpp"

namespace semispec {

namespace {

constexpr double kDegeneracyTol = 1e-8;
constexpr double kMergeRadius = 1e-6;
constexpr double kBoundaryMargin = 1e-3;
constexpr double kClassifyTol = 1e-6;
constexpr double kVanishingGradient = 1e-10;
constexpr int kNewtonMaxIter = 200;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

std::vector<double> hessian_eigenvalues(const PotentialProfile& p, const Point2& at) {
  const auto H = p.hessian(at.x, at.y);
  if (p.dim() == 1) return {H[0][0]};
  // symmetric 2x2, closed form
  const double a = H[0][0], b = H[0][1], d = H[1][1];
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  return {mean - rad, mean + rad};
}

double distance_to_boundary(const Domain& domain, const Point2& p) {
  if (const auto* iv = std::get_if<Interval>(&domain)) return std::min(p.x - iv->lo, iv->hi - p.x);
  const auto& r = std::get<Rectangle>(domain);
  return std::min({p.x - r.x.lo, r.x.hi - p.x, p.y - r.y.lo, r.y.hi - p.y});
}

bool inside_closed(const Domain& domain, const Point2& p, double slack) {
  return distance_to_boundary(domain, p) >= -slack;
}

bool gradient_small(const PotentialProfile& p, const Point2& at) {
  const auto g = p.gradient(at.x, at.y);
  const auto H = p.hessian(at.x, at.y);
  double hnorm = 0.0;
  for (int i = 0; i < p.dim(); ++i)
    for (int j = 0; j < p.dim(); ++j) hnorm = std::max(hnorm, std::abs(H[i][j]));
  const double gnorm = p.dim() == 1 ? std::abs(g[0]) : std::hypot(g[0], g[1]);
  const double xnorm = p.dim() == 1 ? std::abs(at.x) : std::hypot(at.x, at.y);
  return gnorm <= 1e-10 * (1.0 + hnorm * xnorm);
}

// Newton on grad V = 0. Once the gradient test passes, iterates continue until the
// step stalls so that degenerate (linearly convergent) roots are approached closely.
std::optional<Point2> newton(const PotentialProfile& p, Point2 x) {
  std::optional<Point2> accepted;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    if (gradient_small(p, x)) accepted = x;
    const auto g = p.gradient(x.x, x.y);
    const auto H = p.hessian(x.x, x.y);
    double dx = 0.0, dy = 0.0;
    if (p.dim() == 1) {
      if (H[0][0] == 0.0) return accepted;
      dx = g[0] / H[0][0];
    } else {
      const double det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
      const double scale = std::max({std::abs(H[0][0]), std::abs(H[1][1]), std::abs(H[0][1]), 1e-300});
      if (std::abs(det) <= 1e-14 * scale * scale) return accepted;
      dx = (H[1][1] * g[0] - H[0][1] * g[1]) / det;
      dy = (-H[1][0] * g[0] + H[0][0] * g[1]) / det;
    }
    const Point2 next{x.x - dx, x.y - dy};
    if (!std::isfinite(next.x) || !std::isfinite(next.y)) return accepted;
    x = next;
    if (accepted && std::hypot(dx, dy) <= 1e-14 * (1.0 + std::hypot(x.x, x.y))) {
      return gradient_small(p, x) ? x : *accepted;
    }
  }
  if (gradient_small(p, x)) return x;
  return accepted;
}

// `hess_scale` is the largest Hessian entry over the seed grid; degeneracy is judged
// against it so that a vanishing Hessian is detected in 1D as well.
CriticalPoint annotate(const PotentialProfile& p, const Point2& at, double hess_scale) {
  CriticalPoint cp;
  cp.location = p.dim() == 1 ? std::vector<double>{at.x} : std::vector<double>{at.x, at.y};
  cp.hess_eigenvalues = hessian_eigenvalues(p, at);
  double norm = hess_scale;
  for (double l : cp.hess_eigenvalues) norm = std::max(norm, std::abs(l));
  cp.degenerate = norm == 0.0;
  for (double l : cp.hess_eigenvalues) {
    if (std::abs(l) < kDegeneracyTol * norm) cp.degenerate = true;
  }
  cp.kappa = kappa_of(cp.hess_eigenvalues);
  cp.level = p.value(at.x, at.y);
  return cp;
}

double dist(const CriticalPoint& c, const Point2& p) {
  const double dx = c.location[0] - p.x;
  const double dy = c.location.size() > 1 ? c.location[1] - p.y : 0.0;
  return std::hypot(dx, dy);
}

bool has_root_in(const std::vector<CriticalPoint>& pts, double x0, double x1, double y0, double y1) {
  for (const auto& c : pts) {
    const double x = c.location[0];
    const double y = c.location.size() > 1 ? c.location[1] : 0.0;
    if (x >= x0 && x <= x1 && y >= y0 && y <= y1) return true;
  }
  return false;
}

}  // namespace

int domain_dim(const Domain& d) { return std::holds_alternative<Interval>(d) ? 1 : 2; }

double domain_diameter(const Domain& d) {
  if (const auto* iv = std::get_if<Interval>(&d)) return iv->length();
  const auto& r = std::get<Rectangle>(d);
  return std::hypot(r.x.length(), r.y.length());
}

void validate_domain(const Domain& d) {
  auto check = [](const Interval& iv, const char* axis) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw ConfigError(std::string("domain bounds not ordered on axis ") + axis);
    }
  };
  if (const auto* iv = std::get_if<Interval>(&d)) {
    check(*iv, "x");
  } else {
    check(std::get<Rectangle>(d).x, "x");
    check(std::get<Rectangle>(d).y, "y");
  }
}

PotentialProfile::PotentialProfile(PotentialExpr expr, int dim) : expr_(std::move(expr)), dim_(dim) {
  if (dim != 1 && dim != 2) throw ConfigError("potential dimension must be 1 or 2");
  if (dim == 1 && expr_.uses(Variable::Y)) throw ConfigError("variable y used in a 1D potential");
  text_ = expr_.to_string();
  for (int i = 0; i < 2; ++i) {
    grad_[i] = i < dim ? differentiate(expr_, static_cast<Variable>(i)) : PotentialExpr::constant(0.0);
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      hess_[i][j] = (i < dim && j < dim) ? differentiate(grad_[i], static_cast<Variable>(j))
                                         : PotentialExpr::constant(0.0);
    }
  }
}

PotentialProfile PotentialProfile::parse(std::string_view text, int dim) {
  PotentialProfile p(parse_potential(text, dim), dim);
  p.text_ = std::string(text);
  return p;
}

std::array<double, 2> PotentialProfile::gradient(double x, double y) const {
  return {grad_[0].evaluate(x, y), grad_[1].evaluate(x, y)};
}

std::array<std::array<double, 2>, 2> PotentialProfile::hessian(double x, double y) const {
  return {{{hess_[0][0].evaluate(x, y), hess_[0][1].evaluate(x, y)},
           {hess_[1][0].evaluate(x, y), hess_[1][1].evaluate(x, y)}}};
}

double kappa_of(const std::vector<double>& hess_eigenvalues) {
  if (hess_eigenvalues.empty()) throw ConfigError("kappa_of: empty eigenvalue list");
  double k = 0.0;
  for (double l : hess_eigenvalues) k += std::sqrt(std::abs(l));
  return k;
}

CriticalPointSearch find_critical_points(const PotentialProfile& profile, const Domain& domain,
                                         int seeds_per_axis) {
  if (seeds_per_axis < 8) throw ConfigError("find_critical_points: seeds_per_axis must be >= 8");
  if (domain_dim(domain) != profile.dim()) throw ConfigError("potential and domain dimensions differ");
  validate_domain(domain);

  const double diam = domain_diameter(domain);
  const double merge = kMergeRadius * diam;
  const double margin = kBoundaryMargin * diam;

  Interval ax = std::holds_alternative<Interval>(domain) ? std::get<Interval>(domain)
                                                         : std::get<Rectangle>(domain).x;
  Interval ay = std::holds_alternative<Interval>(domain) ? Interval{0.0, 0.0}
                                                         : std::get<Rectangle>(domain).y;
  const int ny = profile.dim() == 2 ? seeds_per_axis : 1;
  auto seed_x = [&](int i) { return ax.lo + ax.length() * i / (seeds_per_axis - 1); };
  auto seed_y = [&](int j) { return ny == 1 ? 0.0 : ay.lo + ay.length() * j / (ny - 1); };

  double hess_scale = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < seeds_per_axis; ++i) {
      const auto H = profile.hessian(seed_x(i), seed_y(j));
      for (int a = 0; a < profile.dim(); ++a)
        for (int b = 0; b < profile.dim(); ++b) hess_scale = std::max(hess_scale, std::abs(H[a][b]));
    }
  }

  CriticalPointSearch out;
  std::vector<CriticalPoint> all;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < seeds_per_axis; ++i) {
      auto root = newton(profile, {seed_x(i), seed_y(j)});
      if (!root || !inside_closed(domain, *root, 1e-12 * diam)) continue;
      const bool dup = std::any_of(all.begin(), all.end(),
                                   [&](const CriticalPoint& c) { return dist(c, *root) < merge; });
      if (dup) continue;
      CriticalPoint cp = annotate(profile, *root, hess_scale);
      all.push_back(cp);
      if (distance_to_boundary(domain, *root) < margin) {
        out.near_boundary.push_back(std::move(cp));
      } else {
        out.interior.push_back(std::move(cp));
      }
    }
  }

  // Sign-change cells that no Newton run resolved.
  for (int j = 0; j + 1 < std::max(ny, 2); ++j) {
    if (profile.dim() == 1 && j > 0) break;
    for (int i = 0; i + 1 < seeds_per_axis; ++i) {
      const double x0 = seed_x(i), x1 = seed_x(i + 1);
      const double y0 = seed_y(j), y1 = profile.dim() == 2 ? seed_y(j + 1) : 0.0;
      bool changes = true;
      for (int c = 0; c < profile.dim(); ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double xx : {x0, x1}) {
          for (double yy : {y0, y1}) {
            const double g = profile.gradient(xx, yy)[c];
            lo = std::min(lo, g);
            hi = std::max(hi, g);
          }
        }
        if (!(lo < 0.0 && hi > 0.0)) changes = false;
      }
      if (changes && !has_root_in(all, x0, x1, y0, y1)) {
        out.flagged_cells.push_back(profile.dim() == 1 ? std::vector<double>{x0, x1}
                                                       : std::vector<double>{x0, x1, y0, y1});
      }
    }
  }

  auto by_location = [](const CriticalPoint& a, const CriticalPoint& b) { return a.location < b.location; };
  std::sort(out.interior.begin(), out.interior.end(), by_location);
  std::sort(out.near_boundary.begin(), out.near_boundary.end(), by_location);
  return out;
}

BoundaryData boundary_data(const PotentialProfile& profile, const Domain& domain, int samples_per_edge) {
  if (domain_dim(domain) != profile.dim()) throw ConfigError("potential and domain dimensions differ");
  validate_domain(domain);
  BoundaryData bd;
  if (const auto* iv = std::get_if<Interval>(&domain)) {
    bd.grad_at_lo = std::abs(profile.gradient(iv->lo)[0]);
    bd.grad_at_hi = std::abs(profile.gradient(iv->hi)[0]);
    bd.J = std::min(bd.grad_at_lo, bd.grad_at_hi);
    if (bd.J < kVanishingGradient) {
      std::ostringstream os;
      os << "|V'| vanishes at an endpoint (J = " << bd.J << "): critical point on the boundary";
      throw RegimeError(os.str());
    }
    bd.J_m = bd.J;
    return bd;
  }

  if (samples_per_edge < 1) throw ConfigError("boundary_data: samples_per_edge must be positive");
  const auto& r = std::get<Rectangle>(domain);
  struct EdgeDef {
    const char* name;
    double nx, ny;  // outward normal
    bool vertical;
    double fixed;
    Interval span;
  };
  const EdgeDef defs[] = {
      {"left", -1, 0, true, r.x.lo, r.y},
      {"right", 1, 0, true, r.x.hi, r.y},
      {"bottom", 0, -1, false, r.y.lo, r.x},
      {"top", 0, 1, false, r.y.hi, r.x},
  };
  for (const auto& e : defs) {
    EdgeRecord rec;
    rec.name = e.name;
    bool first = true;
    for (int k = 0; k < samples_per_edge; ++k) {
      const double s = e.span.lo + e.span.length() * (k + 0.5) / samples_per_edge;
      EdgeSample smp;
      smp.x = e.vertical ? e.fixed : s;
      smp.y = e.vertical ? s : e.fixed;
      const auto g = profile.gradient(smp.x, smp.y);
      smp.grad_norm = std::hypot(g[0], g[1]);
      if (smp.grad_norm < kVanishingGradient) {
        std::ostringstream os;
        os << "grad V vanishes on the " << e.name << " edge at (" << smp.x << ", " << smp.y << ")";
        throw RegimeError(os.str());
      }
      const double normal = std::abs(g[0] * e.nx + g[1] * e.ny);
      const double tangential = std::abs(-g[0] * e.ny + g[1] * e.nx);
      if (tangential <= kClassifyTol * smp.grad_norm) {
        smp.cls = EdgeClass::Perpendicular;
        bd.J_m = bd.J_m ? std::min(*bd.J_m, smp.grad_norm) : smp.grad_norm;
      } else if (normal <= kClassifyTol * smp.grad_norm) {
        smp.cls = EdgeClass::Parallel;
      } else {
        smp.cls = EdgeClass::Oblique;
      }
      if (first) {
        rec.cls = smp.cls;
        first = false;
      } else if (rec.cls != smp.cls) {
        rec.cls = EdgeClass::Mixed;
      }
      rec.samples.push_back(smp);
    }
    bd.edges.push_back(std::move(rec));
  }
  return bd;
}

PredictedAsymptote predicted_limit(const PotentialProfile& profile, const Domain& domain, RegimeChoice choice) {
  const auto search = find_critical_points(profile, domain, 16);
  PredictedAsymptote out;
  for (const auto& cell : search.flagged_cells) {
    std::ostringstream os;
    os << "Newton did not converge in sign-change cell [";
    for (std::size_t i = 0; i < cell.size(); ++i) os << (i ? ", " : "") << cell[i];
    os << "]";
    out.warnings.push_back(os.str());
  }

  const bool has_critical = !search.interior.empty() || !search.near_boundary.empty();
  const bool morse = choice == RegimeChoice::Morse || (choice == RegimeChoice::Auto && has_critical);

  if (!morse) {
    if (has_critical) throw RegimeError("critical points present: the no-critical-point regime does not apply");
    const BoundaryData bd = boundary_data(profile, domain);
    const double mu1 = std::abs(airy_mu1());
    out.regime = Regime::NoCriticalPoint;
    out.h_exponent = 2.0 / 3.0;
    if (profile.dim() == 1) {
      out.prefactor = 0.5 * mu1 * std::cbrt(bd.J * bd.J);
    } else {
      out.lower_bound_only = true;
      out.prefactor = bd.J_m ? 0.5 * mu1 * std::cbrt(*bd.J_m * *bd.J_m)
                             : std::numeric_limits<double>::infinity();
    }
    return out;
  }

  if (!search.near_boundary.empty()) {
    std::ostringstream os;
    os << "critical point within the boundary margin at x = " << search.near_boundary.front().location[0];
    throw RegimeError(os.str());
  }
  if (search.interior.empty()) throw RegimeError("Morse regime requested but V has no interior critical point");
  for (const auto& c : search.interior) {
    if (c.degenerate) {
      std::ostringstream os;
      os << "degenerate critical point at x = " << c.location[0] << ": V is not a Morse function";
      throw RegimeError(os.str());
    }
  }
  const auto best = std::min_element(search.interior.begin(), search.interior.end(),
                                     [](const auto& a, const auto& b) { return a.kappa < b.kappa; });
  out.regime = Regime::Morse;
  out.h_exponent = 1.0;
  out.prefactor = 0.5 * best->kappa;
  out.imag_center = best->level;
  for (const auto& c : search.interior) {
    if (&c == &*best) continue;
    if (std::abs(c.kappa - best->kappa) <= 1e-9 * best->kappa &&
        std::abs(c.level - best->level) <= 1e-9 * (1.0 + std::abs(best->level))) {
      out.warnings.push_back("resonance: two kappa-minimizing critical points share the level " +
                             std::to_string(best->level));
    }
  }
  return out;
}

std::string to_string(Regime r) { return r == Regime::Morse ? "morse" : "no_critical_point"; }

std::string to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::Perpendicular: return "perpendicular";
    case EdgeClass::Parallel: return "parallel";
    case EdgeClass::Oblique: return "oblique";
    case EdgeClass::Mixed: return "mixed";
  }
  return "mixed";
}

}  // namespace semispec
