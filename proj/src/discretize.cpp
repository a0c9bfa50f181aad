#include "semispec/discretize.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "semispec/error.hpp"

namespace semispec {

namespace {

using Potential = std::function<double(double, double)>;

AssembledOperator assemble_1d(const Grid& grid, const Potential& V, double h) {
  const Axis& ax = grid.axes[0];
  const int n = ax.n;
  const double dx = ax.spacing();
  const double off = -h * h / (dx * dx);
  const double diag = 2.0 * h * h / (dx * dx);
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(3 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (i > 0) trip.emplace_back(i, i - 1, off);
    trip.emplace_back(i, i, Complex(diag, V(ax.node(i), 0.0)));
    if (i + 1 < n) trip.emplace_back(i, i + 1, off);
  }
  AssembledOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  op.grid = grid;
  op.h = h;
  return op;
}

AssembledOperator assemble_2d(const Grid& grid, const Potential& V, double h) {
  const Axis& ax = grid.axes[0];
  const Axis& ay = grid.axes[1];
  const int nx = ax.n, ny = ay.n;
  const double cx = h * h / (ax.spacing() * ax.spacing());
  const double cy = h * h / (ay.spacing() * ay.spacing());
  const Eigen::Index N = static_cast<Eigen::Index>(nx) * ny;
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(5 * static_cast<std::size_t>(N));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(j) * nx + i;
      if (j > 0) trip.emplace_back(r, r - nx, -cy);
      if (i > 0) trip.emplace_back(r, r - 1, -cx);
      trip.emplace_back(r, r, Complex(2.0 * cx + 2.0 * cy, V(ax.node(i), ay.node(j))));
      if (i + 1 < nx) trip.emplace_back(r, r + 1, -cx);
      if (j + 1 < ny) trip.emplace_back(r, r + nx, -cy);
    }
  }
  AssembledOperator op;
  op.matrix.resize(N, N);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  op.grid = grid;
  op.h = h;
  return op;
}

double resolution_scale(double h, ResolutionRegime r) {
  switch (r) {
    case ResolutionRegime::Airy: return std::cbrt(h * h);
    case ResolutionRegime::Morse: return std::sqrt(h);
    case ResolutionRegime::Model: return 1.0;
  }
  return 1.0;
}

int points_needed(double length, double spacing) {
  // smallest n with length/(n+1) <= spacing; the small slack absorbs rounding in length/spacing
  const double ratio = length / spacing;
  const double n1 = std::ceil(ratio * (1.0 - 1e-12));
  if (n1 > 1e9) return std::numeric_limits<int>::max();
  return std::max(1, static_cast<int>(n1) - 1);
}

std::size_t resolve_cap(const Domain& domain, std::size_t n_max) {
  if (n_max > 0) return n_max;
  return domain_dim(domain) == 1 ? kDefaultNMax1D : kDefaultNMax2D;
}

Grid raw_grid(double h, const Domain& domain, const ResolutionRule& rule) {
  const double spacing = resolution_scale(h, rule.regime) / rule.points_per_scale;
  if (const auto* iv = std::get_if<Interval>(&domain)) {
    return make_grid(domain, points_needed(iv->length(), spacing));
  }
  const auto& r = std::get<Rectangle>(domain);
  return make_grid(domain, points_needed(r.x.length(), spacing), points_needed(r.y.length(), spacing));
}

bool fits(const Grid& g, std::size_t cap) {
  if (g.axes[0].n == std::numeric_limits<int>::max()) return false;
  if (g.dim == 2 && g.axes[1].n == std::numeric_limits<int>::max()) return false;
  return g.size() <= cap;
}

}  // namespace

Grid Grid::refined(int factor) const {
  Grid g = *this;
  for (int d = 0; d < dim; ++d) g.axes[d].n = axes[d].n * factor;
  return g;
}

std::string Grid::id() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << dim << "d";
  for (int d = 0; d < dim; ++d) os << ":" << axes[d].lo << "," << axes[d].hi << "," << axes[d].n;
  return os.str();
}

Grid make_grid(const Domain& domain, int nx, int ny) {
  validate_domain(domain);
  if (nx < 1) throw ConfigError("grid needs at least one interior point per axis");
  Grid g;
  if (const auto* iv = std::get_if<Interval>(&domain)) {
    g.dim = 1;
    g.axes[0] = {iv->lo, iv->hi, nx};
    g.axes[1] = {0.0, 0.0, 1};
  } else {
    if (ny < 1) throw ConfigError("grid needs at least one interior point per axis");
    const auto& r = std::get<Rectangle>(domain);
    g.dim = 2;
    g.axes[0] = {r.x.lo, r.x.hi, nx};
    g.axes[1] = {r.y.lo, r.y.hi, ny};
  }
  return g;
}

double smallest_feasible_h(const Domain& domain, const ResolutionRule& rule, std::size_t n_max) {
  const std::size_t cap = resolve_cap(domain, n_max);
  if (rule.regime == ResolutionRegime::Model) {
    return fits(raw_grid(1.0, domain, rule), cap) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  double lo = -15.0, hi = 8.0;  // log10 h
  if (!fits(raw_grid(std::pow(10.0, hi), domain, rule), cap)) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fits(raw_grid(std::pow(10.0, mid), domain, rule), cap)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::pow(10.0, hi);
}

Grid grid_for(double h, const Domain& domain, const ResolutionRule& rule, std::size_t n_max) {
  if (!(h > 0.0)) throw ConfigError("grid_for: h must be positive");
  if (rule.points_per_scale < 1) throw ConfigError("grid_for: points_per_scale must be positive");
  const std::size_t cap = resolve_cap(domain, n_max);
  Grid g = raw_grid(h, domain, rule);
  if (!fits(g, cap)) {
    const double hmin = smallest_feasible_h(domain, rule, cap);
    std::ostringstream os;
    os << "infeasible resolution: h = " << h << " needs more than N_max = " << cap
       << " nodes; smallest feasible h = " << std::setprecision(6) << hmin;
    throw InfeasibleResolution(os.str(), hmin);
  }
  return g;
}

SparseMatrixR AssembledOperator::laplacian_part() const {
  SparseMatrixR L = matrix.real();
  L.prune(0.0);
  return L;
}

Eigen::VectorXd AssembledOperator::potential_diagonal() const {
  return matrix.diagonal().imag();
}

Eigen::MatrixXcd AssembledOperator::dense() const { return Eigen::MatrixXcd(matrix); }

std::string AssembledOperator::id() const {
  std::ostringstream os;
  os << std::setprecision(17) << (model_tag ? *model_tag : potential_tag) << "|h=" << h << "|" << grid.id();
  return os.str();
}

AssembledOperator make_matrix_operator(const Eigen::MatrixXcd& m, std::string tag) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ConfigError("operator matrix must be square and nonempty");
  AssembledOperator op;
  op.matrix = m.sparseView(0.0, 0.0);
  op.matrix.makeCompressed();
  op.grid.dim = 1;
  op.grid.axes[0] = {0.0, 1.0, static_cast<int>(m.rows())};
  op.potential_tag = std::move(tag);
  return op;
}

AssembledOperator assemble_interval(const Grid& grid, const PotentialProfile& profile, double h) {
  if (grid.dim != 1) throw ConfigError("assemble_interval needs a 1D grid");
  if (profile.dim() != 1) throw ConfigError("assemble_interval needs a 1D potential");
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  AssembledOperator op = assemble_1d(grid, [&](double x, double) { return profile.value(x); }, h);
  op.potential_tag = profile.text();
  return op;
}

AssembledOperator assemble_rectangle(const Grid& grid, const PotentialProfile& profile, double h) {
  if (grid.dim != 2) throw ConfigError("assemble_rectangle needs a 2D grid");
  if (profile.dim() != 2) throw ConfigError("assemble_rectangle needs a 2D potential");
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  AssembledOperator op = assemble_2d(grid, [&](double x, double y) { return profile.value(x, y); }, h);
  op.potential_tag = profile.text();
  return op;
}

AssembledOperator assemble(const Grid& grid, const PotentialProfile& profile, double h) {
  return grid.dim == 1 ? assemble_interval(grid, profile, h) : assemble_rectangle(grid, profile, h);
}

AssembledOperator assemble_model(const ModelKind& kind, int n, int ny) {
  std::ostringstream tag;
  tag << std::setprecision(17);
  AssembledOperator op;
  if (const auto* m = std::get_if<HalfLineAiry>(&kind)) {
    if (!(m->L > 0.0)) throw ConfigError("model truncation length must be positive");
    const double J = m->J;
    op = assemble_1d(make_grid(Interval{0.0, m->L}, n), [J](double x, double) { return J * x; }, 1.0);
    tag << "HalfLineAiry{J=" << m->J << ",L=" << m->L << "}";
  } else if (const auto* m = std::get_if<Oscillator>(&kind)) {
    if (!(m->L > 0.0)) throw ConfigError("model truncation length must be positive");
    const double a = m->alpha;
    op = assemble_1d(make_grid(Interval{-m->L, m->L}, n), [a](double x, double) { return a * x * x; }, 1.0);
    tag << "Oscillator{alpha=" << m->alpha << ",L=" << m->L << "}";
  } else {
    const auto& hp = std::get<HalfPlane>(kind);
    if (!(hp.Lx > 0.0) || !(hp.Ly > 0.0)) throw ConfigError("model truncation length must be positive");
    const double s = hp.J * std::sin(hp.theta), c = hp.J * std::cos(hp.theta);
    const Rectangle box{{-hp.Lx / 2, hp.Lx / 2}, {0.0, hp.Ly}};
    op = assemble_2d(make_grid(box, n, ny > 0 ? ny : n), [s, c](double x, double y) { return s * x + c * y; }, 1.0);
    tag << "HalfPlane{J=" << hp.J << ",theta=" << hp.theta << ",Lx=" << hp.Lx << ",Ly=" << hp.Ly << "}";
  }
  op.model_tag = tag.str();
  op.potential_tag = tag.str();
  return op;
}

void write_matrix_market(std::ostream& os, const AssembledOperator& op) {
  os << "%%MatrixMarket-compatible\n";
  os << op.matrix.rows() << " " << op.matrix.cols() << " " << op.matrix.nonZeros() << "\n";
  os << std::setprecision(17);
  for (Eigen::Index r = 0; r < op.matrix.outerSize(); ++r) {
    for (SparseMatrixC::InnerIterator it(op.matrix, r); it; ++it) {
      os << it.row() + 1 << " " << it.col() + 1 << " " << it.value().real() << " " << it.value().imag() << "\n";
    }
  }
}

}  // namespace semispec
