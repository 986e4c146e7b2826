#pragma once

// Invariant density on Y by Ulam's method for the induced map, normalised to
// mu(Y) = 1, and its extension to the cells outside Y.

#include <Eigen/Sparse>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "glocal/inducing.hpp"

namespace glocal {

struct UlamOptions {
  std::size_t cells = 4096;
  long tau_cap = 512;
  double tolerance = 1e-12;
  long max_iterations = 100000;
};

/// Cells of Y: nearly equal widths, with a node at every breakpoint of the scheme.
struct UlamGrid {
  std::vector<Interval> cells;
  std::vector<std::size_t> segment;  // cells of one segment see no breakpoint between them
};

UlamGrid ulam_grid(const InducingScheme& scheme, std::size_t m);

/// Column-stochastic Ulam matrix of F acting on cell masses:
/// P(i, j) = Leb(C_j ∩ F^{-1} C_i) / Leb(C_j).
Eigen::SparseMatrix<double> ulam_matrix(const InducingScheme& scheme, const UlamGrid& grid, long tau_cap);

/// The same matrix split into the returns with tau = 1 and one part per tail.
struct UlamParts {
  Eigen::SparseMatrix<double> direct;
  std::vector<Eigen::SparseMatrix<double>> returns;
  Eigen::SparseMatrix<double> combined() const;
};
UlamParts ulam_parts(const InducingScheme& scheme, const UlamGrid& grid, long tau_cap);

/// Entries Leb(C_j ∩ f^{-1} C_i) / Leb(C_j) for the part of Y mapped into Y.
void append_direct_transitions(const InducingScheme& scheme, const std::vector<Interval>& cells,
                               std::vector<Eigen::Triplet<double>>& out);

/// Piecewise-constant h on the grid.
class DensityEstimate {
 public:
  DensityEstimate(UlamGrid grid, Eigen::VectorXd h, double residual, long iterations,
                  std::vector<Eigen::VectorXd> return_flux = {});

  std::size_t size() const { return grid_.cells.size(); }
  const std::vector<Interval>& cells() const { return grid_.cells; }
  const UlamGrid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return h_; }
  /// h_i Leb(C_i); sums to one.
  Eigen::VectorXd masses() const;
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }
  /// Per tail: mu-mass entering each Y cell from the tail in one step, i.e. mu(f_t^{-1} C_i).
  const std::vector<Eigen::VectorXd>& return_flux() const { return return_flux_; }

  std::optional<std::size_t> locate(double y) const;
  /// Exact integral of the piecewise-constant estimate over an interval.
  double integrate(const Interval& I) const;
  /// Linear interpolation of cell-centre values, never across a breakpoint.
  double value(double y) const;
  /// Limit of h at zeta from side +1 (above) or -1 (below), by a linear fit over k cells.
  double one_sided_limit(double zeta, int side, int k = 8) const;

  void write_csv(std::ostream& os) const;

 private:
  UlamGrid grid_;
  Eigen::VectorXd h_;
  std::vector<double> prefix_;
  double residual_;
  long iterations_;
  std::vector<Eigen::VectorXd> return_flux_;
};

DensityEstimate ulam_induced(const InducingScheme& scheme, const UlamOptions& opt = {});

/// Measures of the cells up to depth N.
struct CellMeasures {
  long N = 0;
  std::vector<std::vector<double>> x;  // x[t][n] = mu(X_{n,t}), n = 0..N (n = 0 unused)
  std::vector<std::vector<double>> y;  // y[r][n] = mu(Y_{n,r}), n = 0..N (n < 2 unused)
  std::vector<double> y_remainder;     // mu of the Y_{j,r} with j > N
  double y_direct = 0.0;               // mu(Y_1)

  /// Sum over the feeders of tail t of mu(Y_{j,r}) for j >= n.
  double y_tail(std::size_t t, long n) const;
};

CellMeasures extend_measure(const InducingScheme& scheme, const DensityEstimate& dens, long N);

/// h at x in X_{n,t} from the pushforward series sum_l sum_r h(y)/|(f^l)'(y)|,
/// truncated after `terms` terms and closed with a model of the remainder.
double x_density(const InducingScheme& scheme, const DensityEstimate& dens, std::size_t tail, long n, double x,
                 long terms);

/// mu(X_{n,t}) by Gauss-Legendre quadrature of x_density.
double x_cell_measure_series(const InducingScheme& scheme, const DensityEstimate& dens, std::size_t tail, long n,
                             long terms, int nodes = 48);

/// Nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Sum over s >= 1 of (S / (S + s))^(alpha + 1), the remainder model used for
/// series whose terms decay like a power of the depth.
double power_remainder(double S, double alpha);

/// Remainder beyond depth S of terms A d^-(alpha+1) (1 + B d^-alpha), with A and
/// B fitted to the terms at depths S_half and S.
double fitted_remainder(double t_half, double S_half, double t_last, double S, double alpha);

void write_cell_measures_csv(std::ostream& os, const CellMeasures& cm);

}  // namespace glocal
