#pragma once

// Discretised transfer operator of f with respect to mu on a grid adapted to
// the cells X_{n,p}, and its iteration from 1_Y.

#include <Eigen/Sparse>
#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "glocal/density.hpp"

namespace glocal {

struct OperatorOptions {
  long depth = 100000;     // N: X cells are kept for n <= N
  int subcells = 2;        // blocks of the landing interval pulled back into every X_{n,p}
  double max_leak = 1e-3;  // mu-weighted mass lost from Y per step
};

/// Cells are the Y cells of the density grid followed by the X sub-cells
/// X_{n,t,k} = f_t^{-n}(B_k), where B_0..B_{K-1} split the landing interval of
/// tail t along grid nodes. P(i, j) = mu(cell_j ∩ f^{-1} cell_i) / mu(cell_j),
/// so P acts on vectors of masses.
struct OperatorGrid {
  Eigen::SparseMatrix<double> P;
  Eigen::VectorXd mu;
  std::vector<Interval> y_cells;
  std::size_t tails = 0;
  long depth = 0;
  int subcells = 0;
  double alpha = 0.0;  // largest tail exponent; fixes a_n
  // nodes[t][k][n] = f_t^{-n} of the k-th block node, k = 0..K, n = 0..depth+1
  std::vector<std::vector<std::vector<double>>> nodes;
  // landing cells of each block: block_cells[t][k] = {first, last + 1}
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> block_cells;
  double leak = 0.0;         // sum_j mu_j (1 - column sum_j)
  double column_leak = 0.0;  // max_j (1 - column sum_j)

  std::size_t size() const { return static_cast<std::size_t>(mu.size()); }
  std::size_t y_count() const { return y_cells.size(); }
  std::size_t x_index(std::size_t t, long n, int k) const {
    return y_cells.size() + (t * static_cast<std::size_t>(depth) + static_cast<std::size_t>(n - 1)) * subcells +
           static_cast<std::size_t>(k);
  }
  Interval x_subcell(std::size_t t, long n, int k) const {
    return Interval::sorted(nodes[t][k][n], nodes[t][k + 1][n]);
  }
};

OperatorGrid build_operator(const InducingScheme& scheme, const DensityEstimate& dens, const OperatorOptions& opt = {});

/// a_n = n^(1-alpha) for 0 < alpha < 1, log n for alpha = 1, and 1 where that is undefined.
double normaliser(double alpha, long n);

struct KrickebergProfile {
  std::vector<long> n;
  std::vector<double> K;       // a_n mu(Y ∩ f^{-n} Y) / mu(Y)
  std::vector<double> spread;  // a_n (max - min of L^n 1_Y on Y) / K
  std::vector<double> mass;    // total mass left on the grid
  std::vector<std::pair<long, Eigen::VectorXd>> snapshots;  // a_n L^n 1_Y on the Y cells
};

KrickebergProfile krickeberg_profile(const OperatorGrid& op, long n_max, const std::vector<long>& keep = {});

/// c_n = sum_i g_i (P^n mu 1_Y)_i for n = 0..n_max, one row per observable.
std::vector<std::vector<double>> correlations(const OperatorGrid& op, const std::vector<Eigen::VectorXd>& g,
                                              long n_max);
std::vector<double> correlation(const OperatorGrid& op, const Eigen::VectorXd& g, long n_max);

void write_profile_csv(std::ostream& os, const KrickebergProfile& prof);
void write_correlation_csv(std::ostream& os, const std::vector<double>& c, double alpha);

}  // namespace glocal
