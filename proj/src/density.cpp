#include "glocal/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "glocal/error.hpp"

namespace glocal {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Index of the first cell whose right end exceeds x.
std::size_t first_cell_after(const std::vector<Interval>& cells, double x) {
  auto it = std::upper_bound(cells.begin(), cells.end(), x, [](double v, const Interval& c) { return v < c.hi; });
  return static_cast<std::size_t>(it - cells.begin());
}

// Adds, for every cell C_j meeting S, the entry (target, j) += scale Leb(S ∩ C_j) / Leb(C_j).
void spread(const std::vector<Interval>& cells, const Interval& S, int target, double scale, Triplets& out) {
  for (std::size_t j = first_cell_after(cells, S.lo); j < cells.size() && cells[j].lo < S.hi; ++j) {
    const double ov = overlap_length(cells[j], S);
    if (ov > 0) out.emplace_back(target, static_cast<int>(j), scale * ov / cells[j].length());
  }
}

}  // namespace

UlamGrid ulam_grid(const InducingScheme& scheme, std::size_t m) {
  if (m < 100) throw ConfigError("ulam_cells", "need at least 100 cells");
  const auto& br = scheme.breakpoints();
  std::vector<Interval> segs;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const Interval s{br[i], br[i + 1]};
    if (s.length() > 0 && scheme.in_y(s.mid())) segs.push_back(s);
  }
  const double total = scheme.y_leb();
  // largest-remainder allocation, at least one cell per segment
  std::vector<std::size_t> count(segs.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const double want = double(m) * segs[s].length() / total;
    count[s] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(want)));
    used += count[s];
    rem.emplace_back(want - std::floor(want), s);
  }
  std::sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t i = 0; used < m && i < rem.size(); ++i, ++used) ++count[rem[i].second];

  UlamGrid g;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const std::size_t c = count[s];
    for (std::size_t i = 0; i < c; ++i) {
      const double lo = i == 0 ? segs[s].lo : segs[s].lo + segs[s].length() * double(i) / double(c);
      const double hi = i + 1 == c ? segs[s].hi : segs[s].lo + segs[s].length() * double(i + 1) / double(c);
      g.cells.push_back({lo, hi});
      g.segment.push_back(s);
    }
  }
  return g;
}

void append_direct_transitions(const InducingScheme& scheme, const std::vector<Interval>& cells, Triplets& trip) {
  const MapModel& map = scheme.map();
  for (const auto& d : scheme.direct_pieces()) {
    const Branch& br = map.branches[d.branch];
    for (std::size_t i = first_cell_after(cells, d.image.lo); i < cells.size() && cells[i].lo < d.image.hi; ++i) {
      const auto J = intersect(cells[i], d.image);
      if (!J || !(J->length() > 0)) continue;
      const auto pre = intersect(Interval::sorted(br.inverse(J->lo), br.inverse(J->hi)), d.source);
      if (pre) spread(cells, *pre, static_cast<int>(i), 1.0, trip);
    }
  }
}

UlamParts ulam_parts(const InducingScheme& scheme, const UlamGrid& grid, long tau_cap) {
  if (tau_cap < 2) throw ConfigError("tau_cap", "must be at least 2");
  const auto& cells = grid.cells;
  const MapModel& map = scheme.map();
  const int m = static_cast<int>(cells.size());
  UlamParts parts;
  Triplets direct;
  append_direct_transitions(scheme, cells, direct);
  parts.direct.resize(m, m);
  parts.direct.setFromTriplets(direct.begin(), direct.end());

  for (std::size_t t = 0; t < scheme.tails().size(); ++t) {
    const Tail& tl = scheme.tails()[t];
    const Branch& bt = map.branches[tl.branch];
    std::vector<int> landing;
    std::vector<double> row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!(overlap_length(cells[i], tl.landing) > 0)) continue;
      if (landing.empty()) row.push_back(cells[i].lo);
      landing.push_back(static_cast<int>(i));
      row.push_back(cells[i].hi);
    }
    const auto feeders = scheme.feeders_of(t);
    Triplets trip;
    for (long l = 1; l <= tau_cap; ++l) {
      for (double& v : row) v = bt.inverse(v);
      if (l < tau_cap) {
        for (std::size_t r : feeders)
          for (std::size_t q = 0; q < landing.size(); ++q)
            if (const auto pre = scheme.feeder_preimage(r, Interval::sorted(row[q], row[q + 1])))
              spread(cells, *pre, landing[q], 1.0, trip);
        continue;
      }
      // deeper returns land with the distribution of the last resolved level
      std::vector<double> w(landing.size());
      double sum = 0;
      for (std::size_t q = 0; q < landing.size(); ++q) sum += (w[q] = std::abs(row[q + 1] - row[q]));
      for (std::size_t r : feeders) {
        const auto D = scheme.deep_y(r, tau_cap + 1);
        if (!D) continue;
        for (std::size_t j = first_cell_after(cells, D->lo); j < cells.size() && cells[j].lo < D->hi; ++j) {
          const double frac = overlap_length(cells[j], *D) / cells[j].length();
          if (!(frac > 0)) continue;
          for (std::size_t q = 0; q < landing.size(); ++q)
            if (w[q] > 0) trip.emplace_back(landing[q], static_cast<int>(j), frac * w[q] / sum);
        }
      }
    }
    parts.returns.emplace_back(m, m);
    parts.returns.back().setFromTriplets(trip.begin(), trip.end());
  }
  return parts;
}

Eigen::SparseMatrix<double> UlamParts::combined() const {
  Eigen::SparseMatrix<double> P = direct;
  for (const auto& r : returns) P += r;
  P.makeCompressed();
  return P;
}

Eigen::SparseMatrix<double> ulam_matrix(const InducingScheme& scheme, const UlamGrid& grid, long tau_cap) {
  const Eigen::SparseMatrix<double> P = ulam_parts(scheme, grid, tau_cap).combined();
  const int m = static_cast<int>(P.cols());
  const Eigen::RowVectorXd colsum = Eigen::RowVectorXd::Ones(m) * P;
  const double defect = (colsum.array() - 1.0).abs().maxCoeff();
  if (defect > 1e-6)
    throw StructuralError("Ulam matrix is not stochastic: column defect " + std::to_string(defect));
  return P;
}

DensityEstimate::DensityEstimate(UlamGrid grid, Eigen::VectorXd h, double residual, long iterations,
                                 std::vector<Eigen::VectorXd> return_flux)
    : grid_(std::move(grid)),
      h_(std::move(h)),
      residual_(residual),
      iterations_(iterations),
      return_flux_(std::move(return_flux)) {
  prefix_.assign(size() + 1, 0.0);
  for (std::size_t i = 0; i < size(); ++i) prefix_[i + 1] = prefix_[i] + h_[i] * grid_.cells[i].length();
}

Eigen::VectorXd DensityEstimate::masses() const {
  Eigen::VectorXd m(size());
  for (std::size_t i = 0; i < size(); ++i) m[i] = h_[i] * grid_.cells[i].length();
  return m;
}

std::optional<std::size_t> DensityEstimate::locate(double y) const {
  const std::size_t i = first_cell_after(grid_.cells, y);
  if (i < size() && grid_.cells[i].contains(y)) return i;
  if (i > 0 && grid_.cells[i - 1].hi == y) return i - 1;
  return std::nullopt;
}

double DensityEstimate::integrate(const Interval& I) const {
  if (!(I.length() > 0)) return 0.0;
  const auto& c = grid_.cells;
  const std::size_t a = first_cell_after(c, I.lo);
  if (a >= size() || c[a].lo >= I.hi) return 0.0;
  // last cell starting before I.hi
  auto it = std::lower_bound(c.begin(), c.end(), I.hi, [](const Interval& x, double v) { return x.lo < v; });
  const std::size_t b = static_cast<std::size_t>(it - c.begin()) - 1;
  if (a == b) return h_[a] * overlap_length(c[a], I);
  double s = h_[a] * overlap_length(c[a], I) + h_[b] * overlap_length(c[b], I);
  s += prefix_[b] - prefix_[a + 1];
  return s;
}

double DensityEstimate::value(double y) const {
  auto idx = locate(y);
  if (!idx) {
    const std::size_t i = first_cell_after(grid_.cells, y);
    const double tol = 1e-12;
    if (i < size() && grid_.cells[i].lo - y < tol && grid_.cells[i].lo >= y)
      idx = i;
    else if (i > 0 && y - grid_.cells[i - 1].hi < tol)
      idx = i - 1;
    else
      throw OutOfRange("density requested outside Y at " + std::to_string(y));
  }
  const std::size_t i = *idx;
  const double ci = grid_.cells[i].mid();
  const auto same = [&](std::size_t j) { return j < size() && grid_.segment[j] == grid_.segment[i]; };
  std::size_t j;
  if (y >= ci)
    j = same(i + 1) ? i + 1 : i - 1;
  else
    j = (i > 0 && same(i - 1)) ? i - 1 : i + 1;
  if (!same(j)) return h_[i];
  const double cj = grid_.cells[j].mid();
  return h_[i] + (h_[j] - h_[i]) * (y - ci) / (cj - ci);
}

double DensityEstimate::one_sided_limit(double zeta, int side, int k) const {
  const auto& c = grid_.cells;
  const double tol = 1e-12;
  std::size_t start;
  if (side > 0) {
    start = first_cell_after(c, zeta);
    if (start >= size() || std::abs(c[start].lo - zeta) > tol)
      throw OutOfRange("one_sided_limit: no cell of Y starts at " + std::to_string(zeta));
  } else {
    const std::size_t i = first_cell_after(c, zeta - tol);
    if (i >= size() || std::abs(c[i].hi - zeta) > tol)
      throw OutOfRange("one_sided_limit: no cell of Y ends at " + std::to_string(zeta));
    start = i;
  }
  std::vector<std::size_t> idx{start};
  while (static_cast<int>(idx.size()) < k) {
    const std::size_t last = idx.back();
    const std::size_t next = side > 0 ? last + 1 : last - 1;
    if (side < 0 && last == 0) break;
    if (next >= size() || grid_.segment[next] != grid_.segment[start]) break;
    idx.push_back(next);
  }
  if (idx.size() == 1) return h_[start];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i : idx) {
    const double x = c[i].mid() - zeta;
    sx += x;
    sy += h_[i];
    sxx += x * x;
    sxy += x * h_[i];
  }
  const double n = double(idx.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return (sy - slope * sx) / n;
}

void DensityEstimate::write_csv(std::ostream& os) const {
  os << "left,right,h\n";
  os.precision(17);
  for (std::size_t i = 0; i < size(); ++i) os << grid_.cells[i].lo << ',' << grid_.cells[i].hi << ',' << h_[i] << '\n';
}

DensityEstimate ulam_induced(const InducingScheme& scheme, const UlamOptions& opt) {
  UlamGrid grid = ulam_grid(scheme, opt.cells);
  const UlamParts parts = ulam_parts(scheme, grid, opt.tau_cap);
  const Eigen::SparseMatrix<double> P = parts.combined();
  {
    const Eigen::RowVectorXd colsum = Eigen::RowVectorXd::Ones(P.rows()) * P;
    const double defect = (colsum.array() - 1.0).abs().maxCoeff();
    if (defect > 1e-6)
      throw StructuralError("Ulam matrix is not stochastic: column defect " + std::to_string(defect));
  }
  const Eigen::Index m = P.cols();
  Eigen::VectorXd p(m);
  for (Eigen::Index i = 0; i < m; ++i) p[i] = grid.cells[i].length();
  p /= p.sum();
  double res = 1;
  long it = 0;
  Eigen::VectorXd q(m);
  while (it < opt.max_iterations) {
    q = P * p;
    q /= q.sum();
    res = (q - p).lpNorm<1>();
    p.swap(q);
    ++it;
    if (res <= opt.tolerance) break;
  }
  res = (P * p - p).lpNorm<1>();
  if (res > opt.tolerance * 10) throw NumericalError("Ulam power iteration did not converge", res);
  Eigen::VectorXd h(m);
  for (Eigen::Index i = 0; i < m; ++i) h[i] = p[i] / grid.cells[i].length();
  std::vector<Eigen::VectorXd> flux;
  for (const auto& R : parts.returns) flux.emplace_back(R * p);
  return DensityEstimate(std::move(grid), std::move(h), res, it, std::move(flux));
}

double CellMeasures::y_tail(std::size_t t, long n) const {
  if (n < 2 || n - 1 > N) throw OutOfRange("y_tail: depth outside the extended range");
  return x.at(t)[n - 1];
}

CellMeasures extend_measure(const InducingScheme& scheme, const DensityEstimate& dens, long N) {
  if (N < 2) throw ConfigError("depth_cells", "need N >= 2");
  CellMeasures cm;
  cm.N = N;
  const auto& tails = scheme.tails();
  const auto& feeders = scheme.feeders();
  for (std::size_t t = 0; t < tails.size(); ++t) scheme.tail_points(t, N + 1);
  cm.x.assign(tails.size(), std::vector<double>(N + 1, 0.0));
  cm.y.assign(feeders.size(), std::vector<double>(N + 1, 0.0));
  cm.y_remainder.assign(feeders.size(), 0.0);
  for (std::size_t r = 0; r < feeders.size(); ++r) {
    for (long n = 2; n <= N; ++n)
      if (const auto c = scheme.y_cell(r, n)) cm.y[r][n] = dens.integrate(*c);
    if (const auto d = scheme.deep_y(r, N + 1)) cm.y_remainder[r] = dens.integrate(*d);
  }
  for (std::size_t t = 0; t < tails.size(); ++t)
    for (long n = 1; n <= N; ++n)
      for (std::size_t r : scheme.feeders_of(t))
        if (const auto d = scheme.deep_y(r, n + 1)) cm.x[t][n] += dens.integrate(*d);
  for (const auto& d : scheme.direct_pieces()) cm.y_direct += dens.integrate(d.source);
  return cm;
}

double power_remainder(double S, double alpha) {
  // midpoint rule for the integral of (S/(S+u))^(alpha+1) over u > 1/2
  return std::pow(S, alpha + 1) * std::pow(S + 0.5, -alpha) / alpha;
}

double fitted_remainder(double t_half, double S_half, double t_last, double S, double alpha) {
  // terms ~ A d^-(alpha+1) (1 + B d^-alpha): a power law times a Lipschitz density near the accumulation point
  const double uh = t_half * std::pow(S_half, alpha + 1);
  const double ul = t_last * std::pow(S, alpha + 1);
  const double gh = std::pow(S_half, -alpha), gl = std::pow(S, -alpha);
  double AB = 0;
  if (t_half > 0 && S > S_half) AB = (uh - ul) / (gh - gl);
  const double A = ul - AB * gl;
  return A * std::pow(S + 0.5, -alpha) / alpha + AB * std::pow(S + 0.5, -2 * alpha) / (2 * alpha);
}

double x_density(const InducingScheme& scheme, const DensityEstimate& dens, std::size_t tail, long n, double x,
                 long terms) {
  const Tail& tl = scheme.tails().at(tail);
  const MapModel& map = scheme.map();
  const Branch& bt = map.branches[tl.branch];
  const auto feeders = scheme.feeders_of(tail);
  double z = x;
  double logprod = 0;
  double sum = 0, last = 0, prev = 0, half = 0;
  const long lhalf = std::max<long>(1, terms / 2);
  for (long l = 1; l <= terms; ++l) {
    if (l > 1) {
      z = bt.inverse(z);
      logprod += bt.log_deriv(z);
    }
    double term = 0;
    for (std::size_t r : feeders) {
      const Branch& fr = map.branches[scheme.feeders()[r].branch];
      if (!fr.range().contains(z)) continue;
      const double y = fr.inverse(z);
      if (!scheme.y_pieces()[scheme.feeders()[r].piece].contains(y)) continue;
      term += dens.value(y) / std::abs(fr.deriv(y));
    }
    term *= std::exp(-logprod);
    sum += term;
    prev = last;
    last = term;
    if (l == lhalf) half = term;
  }
  if (tl.alpha > 0) {
    sum += fitted_remainder(half, double(n + lhalf - 1), last, double(n + terms - 1), tl.alpha);
  } else if (prev > 0) {
    const double q = last / prev;
    if (q < 1) sum += last * q / (1 - q);
  }
  return sum;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
  return {x, w};
}

double x_cell_measure_series(const InducingScheme& scheme, const DensityEstimate& dens, std::size_t tail, long n,
                             long terms, int nodes) {
  const Interval c = scheme.x_cell(tail, n);
  const auto [gx, gw] = gauss_legendre(nodes);
  double s = 0;
  for (int i = 0; i < nodes; ++i) {
    const double x = c.mid() + 0.5 * c.length() * gx[i];
    s += gw[i] * x_density(scheme, dens, tail, n, x, terms);
  }
  return 0.5 * c.length() * s;
}

void write_cell_measures_csv(std::ostream& os, const CellMeasures& cm) {
  os << "kind,n,index,mu\n";
  os.precision(17);
  for (std::size_t t = 0; t < cm.x.size(); ++t)
    for (long n = 1; n <= cm.N; ++n) os << "X," << n << ',' << t << ',' << cm.x[t][n] << '\n';
  for (std::size_t r = 0; r < cm.y.size(); ++r)
    for (long n = 2; n <= cm.N; ++n) os << "Y," << n << ',' << r << ',' << cm.y[r][n] << '\n';
}

}  // namespace glocal
