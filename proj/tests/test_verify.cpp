#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glocal/error.hpp"
#include "glocal/verify.hpp"
#include "json.hpp"

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

OperatorGrid op_for(const InducingScheme& s, const DensityEstimate& d, long N, int K = 2) {
  OperatorOptions o;
  o.depth = N;
  o.subcells = K;
  o.max_leak = 0.5;
  return build_operator(s, d, o);
}

struct Lsv {
  InducingScheme s{make("lsv", 0.5)};
  DensityEstimate d = ulam(s, 1024);
};

const Lsv& lsv() {
  static const Lsv L;
  return L;
}

}  // namespace

TEST_CASE("renewal sums") {
  // direct Riemann-sum oracle for the beta integral at small n
  long double s = 0;
  for (long j = 1; j <= 10; ++j) s += std::pow((long double)j, -0.5L) / (j == 10 ? 1.0L : std::sqrt((long double)(10 - j)));
  CHECK(cmt_sum(0.5, 10) == doctest::Approx(double(s)).epsilon(1e-14));
  CHECK(std::abs(cmt_sum(0.5, 100000) - std::numbers::pi) < 0.05);
  CHECK(std::abs(cmt_sum(0.5, 100000) - std::numbers::pi) < std::abs(cmt_sum(0.5, 10000) - std::numbers::pi));
  CHECK(cmt_limit(0.75) == doctest::Approx(std::numbers::pi * std::sqrt(2.0)));
  CHECK(cmt_limit(1.0) == 1.0);
  const double d4 = cmt_delta_sum(0.5, 10000), d5 = cmt_delta_sum(0.5, 100000);
  CHECK(d5 < d4);
  CHECK_THROWS_AS(cmt_sum(1.5, 100), ConfigError);
  CHECK_THROWS_AS(cmt_sum(0.5, 1), ConfigError);
}

// Sums with 1/log(2 + j) decay like 1/log n, so from 10^4 to 10^6 they shrink by about 2/3.
TEST_CASE("delta renewal sum halves from 10^4 to 10^6" * doctest::may_fail()) {
  for (double a : {0.5, 0.75, 1.0}) {
    CAPTURE(a);
    CHECK(cmt_delta_sum(a, 1000000) <= 0.5 * cmt_delta_sum(a, 10000));
  }
}

TEST_CASE("eqY on lsv: plateau and additivity") {
  const auto& L = lsv();
  EqYOptions o;
  o.depth = 4000;
  const CheckResult r = check_eqY(L.s, L.d, o);
  CHECK(r.passed());
  CHECK(r.metric("oscillation_p0") < 0.03);
  CHECK(r.metric("additivity_error") < 1e-6);
  CHECK(r.metric("tail_exponent_p0") == doctest::Approx(0.5).epsilon(0.02));
  CHECK(r.table("plateau_p0").rows.back().index == 4000);
}

TEST_CASE("eqY flags exponential tails of the linear control") {
  const InducingScheme s(make("linear"));
  const DensityEstimate d = ulam(s, 300);
  EqYOptions o;
  o.depth = 200;
  const CheckResult r = check_eqY(s, d, o);
  CHECK_FALSE(r.criterion("polynomial_tail"));
  CHECK_FALSE(r.passed());
  REQUIRE_FALSE(r.notes.empty());
  CHECK(r.notes[0].find("non-polynomial") != std::string::npos);
}

TEST_CASE("return tail from forward orbits matches the cell sums") {
  const InducingScheme s(make("qbranch", 0.5));
  const DensityEstimate d = ulam(s, 1024);
  const CellMeasures cm = extend_measure(s, d, 200);
  for (long n : {2L, 7L, 50L, 200L}) CHECK(return_tail_direct(s, d, n) == doctest::Approx(cm.y_tail(0, n)).epsilon(1e-9));
}

TEST_CASE("pointwise Jacobian") {
  const auto& L = lsv();
  const long j = 400, n = 400;
  const Interval X = L.s.x_cell(0, n);
  const JacobianValue v = jacobian(L.s, L.d, j, n, 0, X.mid(), 20 * j);
  CHECK(v.J > 0);
  CHECK(v.J == doctest::Approx(jacobian_target(0.5, j, n)).epsilon(0.01));
  // the density is the series of which J takes one term
  CHECK(v.density == doctest::Approx(x_density(L.s, L.d, 0, n, X.mid(), 20 * j)).epsilon(1e-12));
  // J sums to one over j
  double sum = 0;
  for (long jj = 1; jj <= 200; ++jj) sum += jacobian(L.s, L.d, jj, 30, 0, L.s.x_cell(0, 30).mid(), 4000).J;
  CHECK(sum < 1.0);
  CHECK(sum > 0.5);
  CHECK_THROWS_AS(jacobian(L.s, L.d, j, n, 0, 0.9, 20 * j), StructuralError);
  CHECK_THROWS_AS(jacobian(L.s, L.d, j, n, 0, X.mid(), 3), ConfigError);
}

TEST_CASE("eqJ sweep agrees with the pointwise Jacobian") {
  const auto& L = lsv();
  EqJOptions o;
  o.j_values = {100, 200};
  o.ell_factor = 20;
  const CheckResult r = check_eqJ(L.s, L.d, o);
  CHECK(r.criterion("sup_ratio_p0"));
  CHECK(r.metric("sup_ratio_p0") < 0.05);
  // profile rows are J at the pullbacks of the landing midpoint
  const Table& prof = r.table("profile_j200_p0");
  const Tail& tl = L.s.tails()[0];
  const Branch& f0 = L.s.map().branches[0];
  for (std::size_t i = 0; i < prof.rows.size(); i += 17) {
    const long n = static_cast<long>(prof.rows[i].index);
    double z = tl.landing.mid();
    for (long k = 0; k < n; ++k) z = f0.inverse(z);
    const JacobianValue v = jacobian(L.s, L.d, 200, n, 0, z, n + 200 + 20 * 200);
    CHECK(prof.rows[i].value == doctest::Approx(v.J).epsilon(1e-4));
    CHECK(prof.rows[i].target == doctest::Approx(jacobian_target(0.5, 200, n)));
  }
  CHECK_THROWS_AS(check_eqJ(InducingScheme(make("linear")), ulam(InducingScheme(make("linear")), 200), o),
                  ConfigError);
}

TEST_CASE("derivative profile and the sufficient condition") {
  const auto& L = lsv();
  const double r = derivative_profile(L.s, 2000, 2000, 0);
  CHECK(r > 0.98);
  CHECK(r < 1.02);
  CHECK(derivative_profile(L.s, 1, 100000, 0) == doctest::Approx(1.0).epsilon(1e-4));
  const double a = jj_condition(L.s, 100, 0, 4), b = jj_condition(L.s, 1000, 0, 4), c = jj_condition(L.s, 10000, 0, 4);
  CHECK(b < a);
  CHECK(c < b);
}

TEST_CASE("mass identity for J") {
  const auto& L = lsv();
  for (auto [j, i] : {std::pair{50L, 50L}, std::pair{200L, 80L}}) {
    const auto [lhs, rhs] = mass_identity(L.s, L.d, j, i, 0, 40 * (j + i));
    CHECK(rhs == doctest::Approx(lhs).epsilon(0.01));
  }
  // summed over a sweep of i, J mu(X_i) stays below the mass of the Y cells
  const CellMeasures cm = extend_measure(L.s, L.d, 400);
  const long j = 100;
  double lhs = 0, rhs = 0;
  for (long i = 20; i <= 200; i += 20) {
    lhs += jacobian(L.s, L.d, j, i, 0, L.s.x_cell(0, i).mid(), 4000).J * cm.x[0][i];
    rhs += cm.y[0][i + j];
  }
  CHECK(lhs <= rhs * 1.01);
}

TEST_CASE("mean-zero observable: two routes to the Y integral") {
  // sum_r int_{Y_{j+i,r}} g o f^j dmu against int_{X_i} g J dmu and int_{X_i} g (J - c) dmu
  const auto& L = lsv();
  const long j = 60, i = 40, ell = 6000;
  const Interval X = L.s.x_cell(0, i);
  const double split = X.lo + 0.37 * X.length();
  const auto [gx, gw] = gauss_legendre(24);
  const auto integrate = [&](const Interval& I, auto&& f) {
    double s = 0;
    for (std::size_t q = 0; q < gx.size(); ++q) s += 0.5 * I.length() * gw[q] * f(I.mid() + 0.5 * I.length() * gx[q]);
    return s;
  };
  const Interval left{X.lo, split}, right{split, X.hi};
  const auto hx = [&](double x) { return x_density(L.s, L.d, 0, i, x, ell); };
  const double c = integrate(left, hx) / integrate(right, hx);  // g = 1 on the left, -c on the right
  const auto g = [&](double x) { return x < split ? 1.0 : -c; };

  // direct: pull the two pieces back along f_r^{-1} f_0^{-(j-1)} and integrate h
  const Branch& f0 = L.s.map().branches[0];
  const Branch& fr = L.s.map().branches[L.s.feeders()[0].branch];
  const auto pull = [&](double x) {
    for (long k = 1; k < j; ++k) x = f0.inverse(x);
    return fr.inverse(x);
  };
  // J carries the interpolated h, piecewise linear with kinks at cell centres: integrate
  // it in y, split at those kinks so the rule is exact
  const auto y_integral = [&](const Interval& Y) {
    std::vector<double> knots{Y.lo, Y.hi};
    for (const Interval& C : L.d.cells())
      for (double e : {C.lo, C.mid(), C.hi})
        if (e > Y.lo && e < Y.hi) knots.push_back(e);
    std::sort(knots.begin(), knots.end());
    double s = 0;
    for (std::size_t q = 0; q + 1 < knots.size(); ++q)
      s += integrate(Interval{knots[q], knots[q + 1]}, [&](double y) { return L.d.value(y); });
    return s;
  };
  const double direct = y_integral(Interval::sorted(pull(left.lo), pull(left.hi))) -
                        c * y_integral(Interval::sorted(pull(right.lo), pull(right.hi)));
  // and split the x-integrals at the images of the same kinks under f^j
  const auto push = [&](double y) {
    double x = fr.eval(y);
    for (long k = 1; k < j; ++k) x = f0.eval(x);
    return x;
  };
  const Interval Ypre = Interval::sorted(pull(X.lo), pull(X.hi));
  std::vector<double> cuts{X.lo, X.hi, split};
  for (const Interval& C : L.d.cells())
    for (double e : {C.lo, C.mid(), C.hi})
      if (e > Ypre.lo && e < Ypre.hi) cuts.push_back(push(e));
  std::sort(cuts.begin(), cuts.end());
  const auto split_integrate = [&](const Interval& I, auto&& f) {
    double s = 0;
    for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
      const Interval P{std::max(I.lo, cuts[q]), std::min(I.hi, cuts[q + 1])};
      if (P.hi > P.lo) s += integrate(P, f);
    }
    return s;
  };
  const auto Jh = [&](double x) { return jacobian(L.s, L.d, j, i, 0, x, ell).numerator; };
  const double via_J = split_integrate(left, Jh) - c * split_integrate(right, Jh);
  const double target = jacobian_target(0.5, j, i);
  const auto centred_J = [&](double x) {
    const JacobianValue v = jacobian(L.s, L.d, j, i, 0, x, ell);
    return g(x) * (v.J - target) * hx(x);
  };
  const double via_Jc = split_integrate(left, centred_J) + split_integrate(right, centred_J);
  const double scale = y_integral(Ypre);
  CHECK(std::abs(direct - via_J) < 1e-9 * scale);
  // centring costs only the quadrature error of int g h over X_i
  CHECK(std::abs(direct - via_Jc) < 1e-6 * scale);
}

TEST_CASE("piecewise constant observables") {
  const auto& L = lsv();
  PwcRule r;
  r.kind = PwcRule::zero;
  GlobalObservable z = make_global_pwc(L.s, L.d, r, 2000);
  CHECK(z.centred);
  CHECK(z.mean == 0.0);

  r.kind = PwcRule::alternating;
  GlobalObservable alt = make_global_pwc(L.s, L.d, r, 10000, true);
  CHECK(alt.centred);
  CHECK(alt.centred_residual < 0.01);
  CHECK(alt.level(0, 3) == -1.0);
  CHECK(alt.level(0, 4) == 1.0);
  CHECK(alt.bound == 1.0);

  r.kind = PwcRule::constant;
  r.value = 1.0;
  GlobalObservable one = make_global_pwc(L.s, L.d, r, 10000);
  CHECK_FALSE(one.centred);
  CHECK(one.mean == 1.0);
  // a_N^-1 sum i^-1/2 gamma -> gamma / (1 - alpha)
  const CellMeasures cm = extend_measure(L.s, L.d, 10000);
  CHECK(one.centred_residual == doctest::Approx(2 * tail_constants(L.s, cm)[0]).epsilon(0.02));
  CHECK_THROWS_AS(make_global_pwc(L.s, L.d, r, 10000, true), ConfigError);

  r.kind = PwcRule::block;
  r.block_length = 3;
  GlobalObservable blk = make_global_pwc(L.s, L.d, r, 10000);
  CHECK(blk.level(0, 1) == 1.0);
  CHECK(blk.level(0, 3) == 1.0);
  CHECK(blk.level(0, 4) == -1.0);
  CHECK(blk.level(0, 7) == 1.0);
  CHECK(blk.centred);

  r.kind = PwcRule::custom;
  r.table = {1.0, 1.0, -0.5};
  CHECK_THROWS_AS(make_global_pwc(L.s, L.d, r, 10000, true), ConfigError);
  r.table = {2.0, -2.0};
  GlobalObservable cus = make_global_pwc(L.s, L.d, r, 10000, true);
  CHECK(cus.bound == 2.0);
}

TEST_CASE("mean-zero observables and correlations") {
  const auto& L = lsv();
  const OperatorGrid op = op_for(L.s, L.d, 6000);
  const GlobalObservable g = make_pw_meanzero(op);
  for (long n : {1L, 10L, 100L, 6000L}) {
    double m = 0, w = 0;
    for (int k = 0; k < 2; ++k) {
      const auto i = static_cast<Eigen::Index>(op.x_index(0, n, k));
      m += g.grid[i] * op.mu[i];
      w += op.mu[i];
    }
    CHECK(std::abs(m) <= 1e-10 * w);
  }
  const GlobalObservable flat = make_pw_meanzero(op, [](std::size_t, long n, int) { return double(n % 5); });
  CHECK(flat.grid.cwiseAbs().maxCoeff() < 1e-12);

  PwcRule r;
  r.kind = PwcRule::alternating;
  const GlobalObservable alt = make_global_pwc(L.s, L.d, r, 4000);
  GlobalObservable scaled = alt;
  scaled.label = "scaled";
  scaled.level = [&](std::size_t t, long n) { return -3.25 * alt.level(t, n); };
  const auto c = correlations(op, {alt.on_grid(op), scaled.on_grid(op), g.on_grid(op)}, 400);
  for (std::size_t n = 0; n <= 400; ++n) CHECK(c[1][n] == doctest::Approx(-3.25 * c[0][n]).epsilon(1e-12));
  CHECK(std::abs(c[0][400]) < std::abs(c[0][40]));
  CHECK(std::abs(c[2][400]) < std::abs(c[2][40]));

  GlocalOptions o;
  o.n_max = 400;
  o.n_compare = 40;
  o.tol = 0.05;
  const CheckResult res = glocal_experiment(op, {alt, g}, o);
  CHECK(res.criterion("decay_alternating"));
  CHECK(res.criterion("decay_meanzero_halves"));
  CHECK(res.metric("c_final_alternating") == doctest::Approx(c[0][400]));
}

TEST_CASE("finite-measure control: classical mixing") {
  const InducingScheme s(make("linear"));
  const DensityEstimate d = ulam(s, 600);
  const OperatorGrid op = op_for(s, d, 60);
  PwcRule r;
  r.kind = PwcRule::constant;
  r.value = 1.0;
  const GlobalObservable g = make_global_pwc(s, d, r, 60);
  GlocalOptions o;
  o.n_max = 200;
  o.n_compare = 20;
  const CheckResult res = glocal_experiment(op, {g}, o);
  // g = 1 off Y: mu(Y) mu(X \ Y) / mu(X) = 1 - Leb(Y) = 0.4
  CHECK(res.metric("target_constant") == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(res.metric("c_final_constant") == doctest::Approx(0.4).epsilon(0.02));
  CHECK(res.passed());
}

TEST_CASE("eqK on a short run") {
  const InducingScheme s(make("lsv", 0.75));
  const DensityEstimate d = ulam(s, 1024);
  const OperatorGrid op = op_for(s, d, 3000, 1);
  EqKOptions o;
  o.n_max = 400;
  o.n_half = 200;
  const CheckResult r = check_eqK(op, o);
  CHECK(r.criterion("K_positive"));
  CHECK(r.criterion("spread_decreasing"));
  CHECK(r.metric("spread") < 0.05);
  CHECK(r.metric("cauchy") < 0.03);
}

TEST_CASE("report serialisation") {
  VerificationReport rep;
  rep.meta.emplace_back("family", "lsv");
  CheckResult c;
  c.name = "demo";
  c.metric("x", 1.5);
  c.criterion("ok", true);
  c.criterion("bad", false);
  Table t;
  t.name = "tab";
  t.add(1, 2.0, 4.0);
  c.tables.push_back(t);
  rep.checks.push_back(c);
  const auto j = nlohmann::json::parse(to_json(rep));
  CHECK(j["passed"] == false);
  CHECK(j["meta"]["family"] == "lsv");
  CHECK(j["checks"]["demo"]["metrics"]["x"] == 1.5);
  CHECK(j["checks"]["demo"]["criteria"]["bad"] == false);
  CHECK(j["checks"]["demo"]["tables"]["tab"]["rows"][0][3] == -0.5);
  CHECK_THROWS_AS(c.metric("nope"), OutOfRange);
  std::ostringstream os;
  write_table_csv(os, t);
  CHECK(os.str() == "index,value,target,rel_error\n1,2,4,-0.5\n");
}
