#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <thread>

#include "glocal/error.hpp"
#include "glocal/inducing.hpp"

using namespace glocal;

namespace {

MapModel make(const std::string& tag, std::optional<double> alpha = std::nullopt, std::vector<double> cuts = {}) {
  FamilySpec s;
  s.tag = tag;
  s.alpha = alpha;
  s.cuts = std::move(cuts);
  return make_family(s);
}

const double kGolden = (-1 + std::sqrt(5.0)) / 4;

}  // namespace

TEST_CASE("lsv inducing set and first cell") {
  const InducingScheme s(make("lsv", 1.0));
  REQUIRE(s.y_pieces().size() == 1);
  CHECK(s.y_pieces()[0] == Interval{0.5, 1.0});
  REQUIRE(s.tails().size() == 1);
  const Interval x1 = s.x_cell(0, 1);
  CHECK(x1.lo == doctest::Approx(kGolden).epsilon(1e-15));
  CHECK(x1.hi == 0.5);
  CHECK(s.n0() == 1);
  REQUIRE(s.feeders().size() == 1);
  CHECK(s.feeders()[0].accumulation == 0.5);
}

TEST_CASE("x_1 equals eta1 for every alpha") {
  for (double a : {0.3, 0.5, 0.75, 1.0}) {
    const InducingScheme s(make("lsv", a));
    CHECK(s.tail_point(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.tail_point(0, 1) == 0.5);
  }
}

TEST_CASE("first hit oracles") {
  const InducingScheme s(make("lsv", 1.0));
  CHECK(s.first_hit(0.75, 10) == 1);
  CHECK(s.first_hit(0.4, 10) == 1);
  CHECK(s.first_hit(0.3, 10) == 2);
  CHECK_THROWS_AS(s.first_hit(1e-9, 100), NotFound);
  CHECK_THROWS_AS(s.first_hit(1.5, 100), OutOfRange);
  try {
    s.first_hit(1e-9, 100);
  } catch (const NotFound& e) {
    CHECK(e.cap() == 100);
  }
}

TEST_CASE("induced map oracles") {
  const InducingScheme s(make("lsv", 1.0));
  auto [f1, t1] = s.induced_map(0.77, 100);
  CHECK(f1 == doctest::Approx(0.54).epsilon(1e-15));
  CHECK(t1 == 1);
  auto [f2, t2] = s.induced_map(0.7, 100);
  CHECK(f2 == doctest::Approx(0.72).epsilon(1e-14));
  CHECK(t2 == 2);
  CHECK_THROWS_AS(s.induced_map(0.2, 100), OutOfRange);
  for (int i = 1; i < 100; ++i) {
    const double y = 0.5 + 0.5 * i / 100.0;
    const auto [fy, tau] = s.induced_map(y, 100000);
    CHECK(s.in_y(fy));
    CHECK(s.first_hit(y, 100000) == tau);
  }
}

TEST_CASE("first hit agrees with the cell structure") {
  const InducingScheme s(make("lsv", 0.5));
  for (long n : {1L, 2L, 5L, 40L, 300L}) {
    CHECK(s.first_hit(s.x_cell(0, n).mid(), 100000) == n);
    const auto y = s.y_cell(0, n + 1);
    REQUIRE(y);
    CHECK(s.first_hit(y->mid(), 100000) == n + 1);
  }
}

TEST_CASE("tail law for lsv") {
  struct Case {
    double alpha, bprime;
  };
  for (const Case c : {Case{0.5, 0.353553390593274}, Case{1.0, 0.5}}) {
    const InducingScheme s(make("lsv", c.alpha));
    const TailTable t = s.tail_sequence(0, 100000);
    CHECK(t.b_prime == doctest::Approx(c.bprime).epsilon(1e-12));
    CHECK(std::abs(t.b_prime_estimate / c.bprime - 1) < 0.02);
    CHECK(t.x[0] == doctest::Approx(1.0));
    for (std::size_t n = 1; n < t.x.size(); ++n) REQUIRE(t.x[n] < t.x[n - 1]);
  }
  CHECK_THROWS_AS(InducingScheme(make("lsv", 0.5)).tail_sequence(0, 5), ConfigError);
}

TEST_CASE("cell widths") {
  const InducingScheme s(make("lsv", 0.5));
  for (long n : {1L, 10L, 100L}) {
    const double direct = s.tail_point(0, n) - s.tail_point(0, n + 1);
    CHECK(s.x_cell_leb(0, n) == doctest::Approx(direct).epsilon(1e-10));
    CHECK(s.cell_measure_leb(XCell{0, n}) == s.x_cell_leb(0, n));
  }
  const double bsec = std::pow(0.5, 1.5) * std::pow(4.0, -0.5);
  CHECK(bsec == doctest::Approx(0.176777).epsilon(1e-5));
  CHECK(std::abs(s.x_cell_leb(0, 10000) * std::pow(1e4, 1.5) / bsec - 1) < 0.03);

  const InducingScheme s1(make("lsv", 1.0));
  const long n = 10000;
  const double ratio = s1.cell_measure_leb(YCell{0, n}) / s1.cell_measure_leb(XCell{0, n});
  CHECK(ratio == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS_AS(s1.cell_measure_leb(XCell{3, 1}), OutOfRange);
  CHECK_THROWS_AS(s1.cell_measure_leb(YCell{0, 1}), OutOfRange);
}

TEST_CASE("tail consistency exponent") {
  const double alpha = 0.5;
  const InducingScheme s(make("lsv", alpha));
  const TailTable t = s.tail_sequence(0, 100000);
  auto err = [&](long n) { return std::abs(t.x[n] * std::pow(double(n), alpha) - t.b_prime); };
  const double slope = -std::log(err(100000) / err(1000)) / std::log(100.0);
  const double kappa = 1 / alpha + 0.5;
  CHECK(slope >= 0.9 * (alpha * kappa - 1));
}

TEST_CASE("balance identity at the level of endpoints") {
  for (const auto& m : {make("lsv", 0.5), make("qbranch", 0.5), make("two_sided", 0.5), make("farey"),
                        make("thaler_d", 0.6, {0.3, 0.65})}) {
    const InducingScheme s(m);
    for (std::size_t t = 0; t < s.tails().size(); ++t) {
      const Branch& br = m.branches[s.tails()[t].branch];
      for (long n = 1; n < 200; ++n) {
        const Interval prev = s.x_cell(t, n - 1);
        const Interval cur = s.x_cell(t, n);
        const Interval img = Interval::sorted(br.eval(cur.lo), br.eval(cur.hi));
        CHECK(std::abs(img.lo - prev.lo) < 1e-10);
        CHECK(std::abs(img.hi - prev.hi) < 1e-10);
        for (std::size_t r : s.feeders_of(t)) {
          if (n + 1 <= s.n0()) continue;
          const auto y = s.y_cell(r, n + 1);
          REQUIRE(y);
          CHECK(!s.tails()[t].region.contains(y->mid()));
          const Branch& fr = m.branches[s.feeders()[r].branch];
          const Interval yi = Interval::sorted(fr.eval(y->lo), fr.eval(y->hi));
          CHECK(std::abs(yi.lo - cur.lo) < 1e-10);
          CHECK(std::abs(yi.hi - cur.hi) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("qbranch with two pieces has two preimage cells") {
  const InducingScheme s(make("qbranch", 0.5));
  REQUIRE(s.feeders_of(0).size() == 2);
  for (long n : {2L, 10L, 1000L}) {
    int count = 0;
    for (std::size_t r : s.feeders_of(0))
      if (const auto c = s.y_cell(r, n + 1); c && c->length() > 0) ++count;
    CHECK(count == 2);
  }
}

TEST_CASE("monotone exhaustion") {
  const InducingScheme s(make("lsv", 0.5));
  const long N = 2000;
  double covered = s.y_leb();
  for (long n = 1; n <= N; ++n) covered += s.x_cell_leb(0, n);
  CHECK(covered + s.tail_point(0, N + 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two_sided uses the period-2 orbit") {
  const MapModel m = make("two_sided", 0.5);
  const InducingScheme s(m);
  const double y0 = period_two_point(m);
  CHECK(y0 > 0);
  CHECK(y0 < 0.5);
  CHECK(m.eval(m.eval(y0)) == doctest::Approx(y0).epsilon(1e-13));
  REQUIRE(s.y_pieces().size() == 1);
  CHECK(s.y_pieces()[0].lo == y0);
  CHECK(s.y_pieces()[0].hi == doctest::Approx(m.eval(y0)).epsilon(1e-15));
  REQUIRE(s.tails().size() == 2);
  CHECK(s.feeders_of(0).size() == 1);
  CHECK(s.feeders_of(1).size() == 1);
  CHECK(s.feeders()[s.feeders_of(0)[0]].accumulation == doctest::Approx(0.5));
}

TEST_CASE("thaler with three branches") {
  const MapModel m = make("thaler_d", 0.5, {0.3, 0.65});
  const InducingScheme s(m);
  CHECK(s.tails().size() == 4);
  CHECK(s.feeders().size() == 8);
  for (const auto& t : s.tails()) CHECK(s.in_y(t.x1));
  for (const auto& f : s.feeders()) CHECK(s.in_y(f.accumulation));
  for (int i = 1; i < 200; ++i) {
    const double x = i / 200.0;
    const double fx = m.eval(x);
    if (s.in_y(x)) CHECK(!m.branches[m.branch_index(x)].domain().contains(fx));
  }
}

TEST_CASE("farey scheme uses the reversing branch as feeder") {
  const InducingScheme s(make("farey"));
  REQUIRE(s.feeders().size() == 1);
  CHECK(s.feeders()[0].accumulation == doctest::Approx(1.0));
  const auto y = s.y_cell(0, 5);
  REQUIRE(y);
  CHECK(y->hi <= 1.0);
  CHECK(y->lo > 0.5);
}

TEST_CASE("linear control family has an expanding tail") {
  const InducingScheme s(make("linear"));
  REQUIRE(s.tails().size() == 1);
  CHECK(s.tails()[0].alpha == 0.0);
  CHECK(s.x_cell_leb(0, 10) == doctest::Approx(std::pow(0.4, 10) * 0.6).epsilon(1e-10));
}

TEST_CASE("cells export") {
  const InducingScheme s(make("lsv", 0.5));
  std::ostringstream os;
  s.write_cells_csv(os, 5);
  const std::string out = os.str();
  CHECK(out.rfind("kind,n,index,left,right,leb\n", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 1 + 5 + 4);
}

TEST_CASE("concurrent readers see a consistent tail cache") {
  const InducingScheme s(make("lsv", 0.75));
  std::vector<std::thread> pool;
  std::vector<double> got(4);
  for (int i = 0; i < 4; ++i)
    pool.emplace_back([&, i] { got[i] = s.tail_point(0, 5000 + 1000 * i); });
  for (auto& t : pool) t.join();
  for (int i = 0; i < 4; ++i) CHECK(got[i] == s.tail_point(0, 5000 + 1000 * i));
}
