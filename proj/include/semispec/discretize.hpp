#pragma once

// Finite-difference assembly of A_h = -h^2 Laplace + iV with Dirichlet conditions.
//
// Nodes are the interior points of a uniform grid. In 2D the ordering is
// row-major with x fastest: index(i, j) = j * nx + i, where i runs along x and
// j along y. The ordering is fixed so assembled matrices are bit-reproducible.

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "semispec/potentials.hpp"

namespace semispec {

using Complex = std::complex<double>;
using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using SparseMatrixR = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 1;  // interior points
  double spacing() const { return (hi - lo) / (n + 1); }
  double node(int i) const { return lo + (i + 1) * spacing(); }
};

struct Grid {
  int dim = 1;
  std::array<Axis, 2> axes{};

  std::size_t size() const {
    return dim == 1 ? static_cast<std::size_t>(axes[0].n)
                    : static_cast<std::size_t>(axes[0].n) * static_cast<std::size_t>(axes[1].n);
  }
  /// Same extents with `factor` times as many interior points per axis.
  Grid refined(int factor) const;
  std::string id() const;
};

Grid make_grid(const Domain& domain, int nx, int ny = 0);

enum class ResolutionRegime { Airy, Morse, Model };

struct ResolutionRule {
  ResolutionRegime regime = ResolutionRegime::Airy;
  int points_per_scale = 10;
};

inline constexpr std::size_t kDefaultNMax1D = 4000;
inline constexpr std::size_t kDefaultNMax2D = 250 * 250;

/// Coarsest grid with spacing <= scale(h)/points_per_scale, where scale is h^{2/3}
/// (Airy), h^{1/2} (Morse) or 1 (Model). Throws InfeasibleResolution when the grid
/// would exceed n_max nodes (0 selects the per-dimension default).
Grid grid_for(double h, const Domain& domain, const ResolutionRule& rule, std::size_t n_max = 0);

/// Smallest h whose grid_for grid fits in n_max nodes.
double smallest_feasible_h(const Domain& domain, const ResolutionRule& rule, std::size_t n_max);

struct AssembledOperator {
  SparseMatrixC matrix;
  Grid grid;
  double h = 1.0;
  std::string potential_tag;
  std::optional<std::string> model_tag;

  Eigen::Index rows() const { return matrix.rows(); }
  /// The real part L (scaled Dirichlet Laplacian).
  SparseMatrixR laplacian_part() const;
  /// The diagonal D of the imaginary part, i.e. V at the nodes.
  Eigen::VectorXd potential_diagonal() const;
  Eigen::MatrixXcd dense() const;
  std::string id() const;
};

/// Wraps an arbitrary square matrix; grid metadata is a placeholder 1D grid.
AssembledOperator make_matrix_operator(const Eigen::MatrixXcd& m, std::string tag = "matrix");

AssembledOperator assemble_interval(const Grid& grid, const PotentialProfile& profile, double h);
AssembledOperator assemble_rectangle(const Grid& grid, const PotentialProfile& profile, double h);
/// Dispatches on grid.dim.
AssembledOperator assemble(const Grid& grid, const PotentialProfile& profile, double h);

struct HalfLineAiry {
  double J = 1.0;
  double L = 30.0;
};
struct Oscillator {
  double alpha = 1.0;
  double L = 12.0;
};
struct HalfPlane {
  double J = 1.0;
  double theta = 0.0;
  double Lx = 20.0;
  double Ly = 20.0;
};
using ModelKind = std::variant<HalfLineAiry, Oscillator, HalfPlane>;

/// Truncated model operator with h = 1: HalfLineAiry on (0, L), Oscillator on (-L, L),
/// HalfPlane on (-Lx/2, Lx/2) x (0, Ly), all with Dirichlet walls.
AssembledOperator assemble_model(const ModelKind& kind, int n, int ny = 0);

/// Coordinate text dump: header "%%MatrixMarket-compatible", a size line, then
/// "row col re im" per nonzero, 1-indexed.
void write_matrix_market(std::ostream& os, const AssembledOperator& op);

}  // namespace semispec
