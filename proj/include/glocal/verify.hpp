#pragma once

// Checkers for the tail, Krickeberg and Jacobian conditions, renewal sums,
// global observables and the global-local mixing experiment.

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "glocal/report.hpp"
#include "glocal/transfer.hpp"

namespace glocal {

// ---- tails of the return time

struct EqYOptions {
  long depth = 10000;
  double oscillation_tol = 0.03;
  double additivity_tol = 0.01;
};

/// gamma_p = N^alpha sum_{psi(r)=p} sum_{j>=N} mu(Y_{j,r}) for every tail.
std::vector<double> tail_constants(const InducingScheme& scheme, const CellMeasures& cm);

/// mu_Y(tau >= n) from forward orbits: bisection for the edge of {tau >= n}
/// next to every accumulation point, then quadrature of h.
double return_tail_direct(const InducingScheme& scheme, const DensityEstimate& dens, long n);

CheckResult check_eqY(const InducingScheme& scheme, const DensityEstimate& dens, const EqYOptions& opt = {});

// ---- Jacobians

struct JacobianValue {
  double J = 0;
  double numerator = 0;  // sum_r h(y_j) / |(f^j)'(y_j)|
  double density = 0;    // sum over l >= 1 of the same terms, with the remainder model
};

/// J_{j,n,p}(x) for x in X_{n,p}, from the series truncated after ell_max terms.
JacobianValue jacobian(const InducingScheme& scheme, const DensityEstimate& dens, long j, long n, std::size_t tail,
                       double x, long ell_max);

/// alpha n^alpha (j + n)^-(alpha + 1)
double jacobian_target(double alpha, long j, long n);

struct EqJOptions {
  std::vector<long> j_values{250, 500, 1000, 2000};
  double eps = 0.2;
  std::vector<double> eps_sweep{0.1, 0.2, 0.4};
  double ell_factor = 50;  // series truncated after ell_factor * j terms
  double sup_tol = 0.05;
  double eps_stability = 2.0;
};

/// For every tail and j: S_j = sum over eps j < n < j / eps of max over three
/// points of X_{n,p} of |J - c|, and the sup-ratio max |J / c - 1|. The three
/// points are both ends of the cell and the pullback of the landing midpoint.
CheckResult check_eqJ(const InducingScheme& scheme, const DensityEstimate& dens, const EqJOptions& opt = {});

/// {(f^j)'(y)}^-1 f_r'(zeta_r) ((j + n) / n)^(alpha + 1) at y = f_r^{-1}(x_{n+j-1}); tends to 1.
double derivative_profile(const InducingScheme& scheme, long j, long n, std::size_t feeder);

/// sup over l <= k_factor n of |(n / (l + n))^(alpha+1) |(f^l)'(y_l)| - f_r'(zeta_r)|.
double jj_condition(const InducingScheme& scheme, long n, std::size_t feeder, double k_factor);

/// sum_r mu(Y_{j+i,r}) and the integral over X_{i,p} of J_{j,i,p} h.
std::pair<double, double> mass_identity(const InducingScheme& scheme, const DensityEstimate& dens, long j, long i,
                                        std::size_t tail, long ell_max, int nodes = 16);

// ---- renewal sums

/// sum_{j=1}^n a_{n-j}^-1 j^-alpha
double cmt_sum(double alpha, long n);
/// the same with the extra factor 1 / log(2 + j)
double cmt_delta_sum(double alpha, long n);
double cmt_limit(double alpha);

// ---- Krickeberg condition

struct EqKOptions {
  long n_max = 2000;
  long n_half = 1000;
  double spread_tol = 0.05;
  double cauchy_tol = 0.03;
};

CheckResult check_eqK(const OperatorGrid& op, const EqKOptions& opt = {});

// ---- observables

enum class ObservableKind { piecewise_constant, piecewise_meanzero, general };

struct PwcRule {
  enum Kind { zero, constant, alternating, block, custom } kind = zero;
  double value = 1.0;          // for constant
  long block_length = 1;       // for block: +1 on L levels, then -1 on L levels
  std::vector<double> table;   // for custom: levels 1..size, repeated
  double y_value = 0.0;        // value on Y
};

struct GlobalObservable {
  ObservableKind kind = ObservableKind::general;
  std::string label;
  double mean = 0.0;   // declared g-bar
  double bound = 0.0;  // sup |g|
  bool centred = false;
  double centred_residual = 0.0;  // a_N^-1 |sum_{i=n0}^N i^-alpha g_i|, g_i = sum_p gamma_p g_{i,p}
  std::function<double(std::size_t, long)> level;  // g on X_{n,p} (piecewise constant)
  double y_value = 0.0;
  Eigen::VectorXd grid;  // values on an operator grid (mean zero and general kinds)

  Eigen::VectorXd on_grid(const OperatorGrid& op) const;
};

/// Levels g_{n,p} from a rule. With require_centred the partial-sum test at
/// depth N must pass, otherwise ConfigError.
GlobalObservable make_global_pwc(const InducingScheme& scheme, const DensityEstimate& dens, const PwcRule& rule,
                                 long depth, bool require_centred = false, double centred_tol = 0.1);

/// Profile per sub-cell X_{n,p,k}, made mean zero on every X_{n,p}. Without a
/// profile: +1 on the left half of the sub-cells and -c_n on the right half.
GlobalObservable make_pw_meanzero(const OperatorGrid& op,
                                  const std::function<double(std::size_t, long, int)>& profile = {});

struct GlocalOptions {
  long n_max = 2000;
  long n_compare = 200;
  double tol = 0.02;
  bool trend_only = false;  // log-speed normalisers: dyadic monotone trend instead of a tolerance
  long trend_from = 16;
};

/// c_n = int_Y g o f^n dmu for each observable against its limit g-bar mu(Y)
/// (mu(Y) int g dmu / mu(X) when mu is finite).
CheckResult glocal_experiment(const OperatorGrid& op, const std::vector<GlobalObservable>& obs,
                              const GlocalOptions& opt = {});

}  // namespace glocal
