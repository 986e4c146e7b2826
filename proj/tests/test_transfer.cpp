#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "glocal/error.hpp"
#include "glocal/transfer.hpp"

using namespace glocal;

namespace {

MapModel make(const std::string& tag, std::optional<double> alpha = std::nullopt) {
  FamilySpec s;
  s.tag = tag;
  s.alpha = alpha;
  return make_family(s);
}

DensityEstimate ulam(const InducingScheme& s, std::size_t m) {
  UlamOptions o;
  o.cells = m;
  return ulam_induced(s, o);
}

OperatorGrid op_for(const InducingScheme& s, const DensityEstimate& d, long N, int K, double leak = 0.5) {
  OperatorOptions o;
  o.depth = N;
  o.subcells = K;
  o.max_leak = leak;
  return build_operator(s, d, o);
}

bool deepest(const OperatorGrid& op, std::size_t i) {
  if (i < op.y_count()) return false;
  return static_cast<long>((i - op.y_count()) / op.subcells) % op.depth + 1 == op.depth;
}

}  // namespace

TEST_CASE("normaliser") {
  CHECK(normaliser(0.5, 0) == 1.0);
  CHECK(normaliser(0.5, 100) == doctest::Approx(10.0));
  CHECK(normaliser(0.75, 16) == doctest::Approx(2.0));
  CHECK(normaliser(1.0, 1) == 1.0);
  CHECK(normaliser(1.0, 100) == doctest::Approx(std::log(100.0)));
  CHECK(normaliser(0.0, 100) == 1.0);
}

TEST_CASE("linear control: stochastic operator and classical mixing") {
  const InducingScheme s(make("linear"));
  const DensityEstimate d = ulam(s, 600);
  const OperatorGrid op = op_for(s, d, 60, 2, 1e-3);
  CHECK(op.leak < 1e-12);
  CHECK(op.column_leak < 1e-12);
  // mu = Leb / Leb(Y)
  for (long n = 1; n <= 10; ++n)
    for (int k = 0; k < 2; ++k)
      CHECK(op.mu[op.x_index(0, n, k)] == doctest::Approx(op.x_subcell(0, n, k).length() / 0.6).epsilon(1e-9));

  const auto prof = krickeberg_profile(op, 200, {200});
  CHECK(prof.K[0] == doctest::Approx(1.0));
  CHECK(prof.spread[0] == doctest::Approx(0.0));
  // L^n 1_Y tends to mu(Y) / mu(X) = Leb(Y)
  REQUIRE(prof.snapshots.size() == 1);
  const Eigen::VectorXd& v = prof.snapshots[0].second;
  CHECK(v.minCoeff() == doctest::Approx(0.6).epsilon(0.02));
  CHECK(v.maxCoeff() == doctest::Approx(0.6).epsilon(0.02));

  // g = 1 on [0, 0.2] and on Y ∩ [0.8, 1]: ∫ g dmu / mu(X) = 0.4
  Eigen::VectorXd g = Eigen::VectorXd::Zero(op.mu.size());
  for (std::size_t i = 0; i < op.y_count(); ++i)
    g[i] = overlap_length(op.y_cells[i], {0.8, 1.0}) / op.y_cells[i].length();
  for (long n = 1; n <= op.depth; ++n)
    for (int k = 0; k < 2; ++k) {
      const Interval c = op.x_subcell(0, n, k);
      g[op.x_index(0, n, k)] = overlap_length(c, {0.0, 0.2}) / c.length();
    }
  const auto c = correlation(op, g, 200);
  CHECK(c[0] == doctest::Approx(0.2 / 0.6).epsilon(1e-9));
  CHECK(c[200] == doctest::Approx(0.4).epsilon(0.02));
  const auto one = correlation(op, Eigen::VectorXd::Ones(op.mu.size()), 50);
  for (double x : one) CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lsv operator: structure, invariance of mu, mass") {
  const InducingScheme s(make("lsv", 0.75));
  const DensityEstimate d = ulam(s, 1024);
  const long N = 4000;
  const OperatorGrid op = op_for(s, d, N, 2);
  REQUIRE(op.size() == 1024 + 2 * N);

  // an X sub-cell with n >= 2 moves whole to its image
  for (long n : {2L, 17L, N}) {
    const auto j = static_cast<Eigen::Index>(op.x_index(0, n, 1));
    int nnz = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.P, j); it; ++it) {
      ++nnz;
      CHECK(it.row() == static_cast<Eigen::Index>(op.x_index(0, n - 1, 1)));
      CHECK(it.value() == 1.0);
    }
    CHECK(nnz == 1);
  }
  // f maps each sub-cell onto the one above it
  const Branch& f0 = s.map().branches[0];
  for (long n : {2L, 100L, 3000L})
    for (int k = 0; k < 2; ++k) {
      const Interval a = op.x_subcell(0, n, k), b = op.x_subcell(0, n - 1, k);
      CHECK(f0.eval(a.lo) == doctest::Approx(b.lo).epsilon(1e-12));
      CHECK(f0.eval(a.hi) == doctest::Approx(b.hi).epsilon(1e-12));
    }
  // sub-cells tile X_n, and their measures add up to the telescoped mu(X_n)
  const CellMeasures cm = extend_measure(s, d, N);
  for (long n : {1L, 10L, 1000L, N}) {
    CHECK(op.x_subcell(0, n, 0).length() + op.x_subcell(0, n, 1).length() ==
          doctest::Approx(s.x_cell(0, n).length()).epsilon(1e-9));
    const double sum = op.mu[op.x_index(0, n, 0)] + op.mu[op.x_index(0, n, 1)];
    CHECK(sum == doctest::Approx(cm.x[0][n]).epsilon(1e-6));
  }

  // L preserves mu, except where the truncation cuts the inflow
  const Eigen::VectorXd Pmu = op.P * op.mu;
  double worst = 0;
  for (std::size_t i = 0; i < op.size(); ++i)
    if (!deepest(op, i)) worst = std::max(worst, std::abs(Pmu[i] - op.mu[i]) / op.mu[i]);
  CHECK(worst < 1e-4);

  const auto prof = krickeberg_profile(op, 400);
  CHECK(prof.K[0] == doctest::Approx(1.0));
  for (std::size_t n = 1; n < prof.n.size(); ++n) {
    CHECK(prof.K[n] > 0);
    CHECK(prof.mass[n - 1] - prof.mass[n] <= op.leak * (1 + 1e-6));
  }
  CHECK(prof.spread[400] < prof.spread[50]);
  CHECK(prof.spread[400] < 0.05);
}

TEST_CASE("correlations share one iteration and are linear") {
  const InducingScheme s(make("lsv", 0.5));
  const DensityEstimate d = ulam(s, 512);
  const OperatorGrid op = op_for(s, d, 2000, 2);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(op.mu.size());
  for (long n = 1; n <= op.depth; ++n)
    for (int k = 0; k < 2; ++k) g[op.x_index(0, n, k)] = n % 2 ? -1.0 : 1.0;
  const auto both = correlations(op, {g, 3.5 * g}, 100);
  const auto single = correlation(op, g, 100);
  for (std::size_t n = 0; n <= 100; ++n) {
    CHECK(both[0][n] == single[n]);
    CHECK(both[1][n] == doctest::Approx(3.5 * single[n]).epsilon(1e-12));
  }
  CHECK(single[0] == 0.0);
  CHECK_THROWS_AS(correlation(op, Eigen::VectorXd::Ones(3), 10), ConfigError);
}

TEST_CASE("leak control and option errors") {
  const InducingScheme s(make("lsv", 0.5));
  const DensityEstimate d = ulam(s, 512);
  OperatorOptions o;
  o.depth = 1000;
  CHECK_THROWS_AS(build_operator(s, d, o), NumericalError);
  o.subcells = 0;
  CHECK_THROWS_AS(build_operator(s, d, o), ConfigError);
  o.subcells = 2;
  o.depth = 1;
  CHECK_THROWS_AS(build_operator(s, d, o), ConfigError);
  o.depth = 100;
  o.max_leak = 2.0;
  CHECK_THROWS_AS(build_operator(s, d, o), ConfigError);
}

TEST_CASE("two tails with a shared landing interval") {
  const InducingScheme s(make("two_sided", 0.5));
  const DensityEstimate d = ulam(s, 1024);
  const OperatorGrid op = op_for(s, d, 3000, 2);
  REQUIRE(op.tails == 2);
  const Eigen::VectorXd Pmu = op.P * op.mu;
  double worst = 0;
  for (std::size_t i = 0; i < op.size(); ++i)
    if (!deepest(op, i)) worst = std::max(worst, std::abs(Pmu[i] - op.mu[i]) / op.mu[i]);
  CHECK(worst < 1e-4);
  const auto prof = krickeberg_profile(op, 300);
  CHECK(prof.spread[300] < prof.spread[30]);
}

TEST_CASE("dumps") {
  const InducingScheme s(make("linear"));
  const DensityEstimate d = ulam(s, 200);
  const OperatorGrid op = op_for(s, d, 40, 1);
  std::ostringstream a, b;
  write_profile_csv(a, krickeberg_profile(op, 3));
  write_correlation_csv(b, {1.0, 0.5}, 0.5);
  const std::string sa = a.str(), sb = b.str();
  CHECK(sa.rfind("n,K,spread\n0,1,0\n", 0) == 0);
  CHECK(sb == "n,c,a_n_c\n0,1,1\n1,0.5,0.5\n");
}
