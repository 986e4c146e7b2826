#include "glocal/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "glocal/error.hpp"

namespace glocal {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::size_t first_cell_after(const std::vector<Interval>& cells, double x) {
  auto it = std::upper_bound(cells.begin(), cells.end(), x, [](double v, const Interval& c) { return v < c.hi; });
  return static_cast<std::size_t>(it - cells.begin());
}

void spread(const std::vector<Interval>& cells, const Interval& S, int target, Triplets& out) {
  for (std::size_t j = first_cell_after(cells, S.lo); j < cells.size() && cells[j].lo < S.hi; ++j) {
    const double ov = overlap_length(cells[j], S);
    if (ov > 0) out.emplace_back(target, static_cast<int>(j), ov / cells[j].length());
  }
}

// Pulls the K + 1 block nodes of one tail back `levels` times. The outer nodes
// are the landing ends, whose pullbacks are the tail points themselves.
std::vector<std::vector<double>> pull_back_nodes(const InducingScheme& scheme, std::size_t t,
                                                 const std::vector<double>& start, long levels) {
  const Tail& tl = scheme.tails()[t];
  const Branch& bt = scheme.map().branches[tl.branch];
  const auto pts = scheme.tail_points(t, levels + 1);
  std::vector<std::vector<double>> out(start.size(), std::vector<double>(static_cast<std::size_t>(levels) + 1));
  for (std::size_t k = 0; k < start.size(); ++k) {
    const bool outer = k == 0 || k + 1 == start.size();
    const long shift = std::abs(start[k] - tl.x0) < std::abs(start[k] - tl.x1) ? 0 : 1;
    double v = start[k];
    for (long n = 0; n <= levels; ++n) {
      if (outer) {
        v = (*pts)[static_cast<std::size_t>(n + shift)];
      } else if (n > 0) {
        v = bt.inverse(v);
      }
      out[k][static_cast<std::size_t>(n)] = v;
    }
  }
  return out;
}

}  // namespace

double normaliser(double alpha, long n) {
  if (alpha > 0 && alpha < 1) return n >= 1 ? std::pow(double(n), 1.0 - alpha) : 1.0;
  if (alpha == 1.0) return n >= 2 ? std::log(double(n)) : 1.0;
  return 1.0;
}

OperatorGrid build_operator(const InducingScheme& scheme, const DensityEstimate& dens, const OperatorOptions& opt) {
  if (opt.depth < 2) throw ConfigError("operator_depth", "must be at least 2");
  if (opt.subcells < 1) throw ConfigError("operator_subcells", "must be positive");
  if (!(opt.max_leak > 0 && opt.max_leak < 1)) throw ConfigError("max_leak", "must lie in (0, 1)");
  if (dens.return_flux().size() != scheme.tails().size())
    throw StructuralError("density estimate carries no return flux for the tails");

  OperatorGrid op;
  op.y_cells = dens.cells();
  op.tails = scheme.tails().size();
  op.depth = opt.depth;
  op.subcells = opt.subcells;
  for (const auto& tl : scheme.tails()) op.alpha = std::max(op.alpha, tl.alpha);

  const auto& cells = op.y_cells;
  const std::size_t m = cells.size();
  const int K = opt.subcells;
  const long N = opt.depth;
  const long M = 2 * N;  // depth where the mu recursion for sub-cells starts
  const std::size_t total = m + op.tails * static_cast<std::size_t>(N) * static_cast<std::size_t>(K);

  op.mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
  op.mu.head(static_cast<Eigen::Index>(m)) = dens.masses();

  Triplets trip;
  append_direct_transitions(scheme, cells, trip);

  for (std::size_t t = 0; t < op.tails; ++t) {
    const Tail& tl = scheme.tails()[t];
    std::vector<std::size_t> landing;
    for (std::size_t i = 0; i < m; ++i)
      if (overlap_length(cells[i], tl.landing) > 0) landing.push_back(i);
    if (landing.size() < static_cast<std::size_t>(K))
      throw ConfigError("operator_subcells", "more blocks than landing cells");

    // blocks of nearly equal length along grid nodes
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::vector<double> start{cells[landing.front()].lo};
    {
      std::vector<double> cum(landing.size());
      double acc = 0;
      for (std::size_t q = 0; q < landing.size(); ++q) cum[q] = (acc += cells[landing[q]].length());
      std::size_t first = 0;
      for (int k = 1; k <= K; ++k) {
        std::size_t last = landing.size() - 1;
        if (k < K) {
          last = static_cast<std::size_t>(
              std::lower_bound(cum.begin(), cum.end(), acc * k / K) - cum.begin());
          last = std::clamp(last, first, landing.size() - 1 - static_cast<std::size_t>(K - k));
        }
        blocks.emplace_back(landing[first], landing[last] + 1);
        start.push_back(cells[landing[last]].hi);
        first = last + 1;
      }
    }
    if (blocks.size() != static_cast<std::size_t>(K)) throw StructuralError("landing interval split failed");

    auto all = pull_back_nodes(scheme, t, start, M + 1);
    const auto sub = [&](long n, int k) { return Interval::sorted(all[k][n], all[k + 1][n]); };
    const auto feeders = scheme.feeders_of(t);

    // mu of the sub-cells, from mu(X_{n,k}) = mu(X_{n+1,k}) + sum_r mu(Y ∩ f_r^{-1} X_{n,k})
    std::vector<std::vector<double>> S(K, std::vector<double>(static_cast<std::size_t>(M) + 2, 0.0));
    {
      double deep = 0;
      for (std::size_t r : feeders)
        if (const auto D = scheme.deep_y(r, M + 2)) deep += dens.integrate(*D);
      double leb = 0;
      for (int k = 0; k < K; ++k) leb += sub(M + 1, k).length();
      for (int k = 0; k < K; ++k) S[k][M + 1] = leb > 0 ? deep * sub(M + 1, k).length() / leb : deep / K;
      for (long n = M; n >= 1; --n)
        for (int k = 0; k < K; ++k) {
          double add = 0;
          for (std::size_t r : feeders)
            if (const auto pre = scheme.feeder_preimage(r, sub(n, k))) add += dens.integrate(*pre);
          S[k][n] = S[k][n + 1] + add;
        }
    }

    for (long n = 1; n <= N; ++n)
      for (int k = 0; k < K; ++k) {
        const auto idx = op.x_index(t, n, k);
        op.mu[static_cast<Eigen::Index>(idx)] = S[k][n];
        for (std::size_t r : feeders)
          if (const auto pre = scheme.feeder_preimage(r, sub(n, k))) spread(cells, *pre, static_cast<int>(idx), trip);
        if (n >= 2) {
          trip.emplace_back(static_cast<int>(op.x_index(t, n - 1, k)), static_cast<int>(idx), 1.0);
          continue;
        }
        // X_{1,k} lands on B_k with the mu-flux of f_t^{-1} C_q
        const auto& flux = dens.return_flux()[t];
        const auto [b0, b1] = blocks[k];
        double sum = 0;
        for (std::size_t q = b0; q < b1; ++q) sum += flux[static_cast<Eigen::Index>(q)];
        for (std::size_t q = b0; q < b1; ++q) {
          const double w = sum > 0 ? flux[static_cast<Eigen::Index>(q)] / sum
                                   : cells[q].length() / Interval{cells[b0].lo, cells[b1 - 1].hi}.length();
          if (w > 0) trip.emplace_back(static_cast<int>(q), static_cast<int>(idx), w);
        }
      }

    for (auto& v : all) v.resize(static_cast<std::size_t>(N) + 2);
    op.nodes.push_back(std::move(all));
    op.block_cells.push_back(std::move(blocks));
  }

  op.P.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  op.P.setFromTriplets(trip.begin(), trip.end());
  op.P.makeCompressed();

  const Eigen::RowVectorXd colsum = Eigen::RowVectorXd::Ones(op.P.rows()) * op.P;
  for (Eigen::Index j = 0; j < colsum.size(); ++j) {
    const double l = 1.0 - colsum[j];
    if (l < -1e-9) throw StructuralError("operator column " + std::to_string(j) + " sums above one");
    op.column_leak = std::max(op.column_leak, l);
    op.leak += op.mu[j] * std::max(l, 0.0);
  }
  if (op.leak > opt.max_leak)
    throw NumericalError("operator leaks " + std::to_string(op.leak) + " of mu(Y) per step; raise operator_depth",
                         op.leak);
  return op;
}

namespace {

// Runs m_{n+1} = P m_n from m_0 = mu 1_Y, calling visit(n, m_n) for n = 0..n_max.
template <class Visit>
void propagate(const OperatorGrid& op, long n_max, Visit&& visit) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(op.mu.size());
  const auto y = static_cast<Eigen::Index>(op.y_count());
  m.head(y) = op.mu.head(y);
  Eigen::VectorXd next(m.size());
  for (long n = 0;; ++n) {
    visit(n, m);
    if (n == n_max) break;
    next.noalias() = op.P * m;
    m.swap(next);
  }
}

}  // namespace

KrickebergProfile krickeberg_profile(const OperatorGrid& op, long n_max, const std::vector<long>& keep) {
  if (n_max < 0) throw ConfigError("n_max", "must be non-negative");
  KrickebergProfile prof;
  const auto y = static_cast<Eigen::Index>(op.y_count());
  const double mu_y = op.mu.head(y).sum();
  propagate(op, n_max, [&](long n, const Eigen::VectorXd& m) {
    const double a = normaliser(op.alpha, n);
    const Eigen::ArrayXd v = m.head(y).array() / op.mu.head(y).array();
    const double K = a * m.head(y).sum() / mu_y;
    prof.n.push_back(n);
    prof.K.push_back(K);
    prof.spread.push_back(K > 0 ? a * (v.maxCoeff() - v.minCoeff()) / K : 0.0);
    prof.mass.push_back(m.sum());
    if (std::find(keep.begin(), keep.end(), n) != keep.end()) prof.snapshots.emplace_back(n, (a * v).matrix());
  });
  return prof;
}

std::vector<std::vector<double>> correlations(const OperatorGrid& op, const std::vector<Eigen::VectorXd>& g,
                                              long n_max) {
  if (n_max < 0) throw ConfigError("n_max", "must be non-negative");
  for (const auto& gi : g)
    if (gi.size() != op.mu.size()) throw ConfigError("observable", "size does not match the operator grid");
  std::vector<std::vector<double>> c(g.size());
  propagate(op, n_max, [&](long, const Eigen::VectorXd& m) {
    for (std::size_t i = 0; i < g.size(); ++i) c[i].push_back(g[i].dot(m));
  });
  return c;
}

std::vector<double> correlation(const OperatorGrid& op, const Eigen::VectorXd& g, long n_max) {
  return correlations(op, {g}, n_max).front();
}

void write_profile_csv(std::ostream& os, const KrickebergProfile& prof) {
  os << "n,K,spread\n";
  os.precision(17);
  for (std::size_t i = 0; i < prof.n.size(); ++i) os << prof.n[i] << ',' << prof.K[i] << ',' << prof.spread[i] << '\n';
}

void write_correlation_csv(std::ostream& os, const std::vector<double>& c, double alpha) {
  os << "n,c,a_n_c\n";
  os.precision(17);
  for (std::size_t n = 0; n < c.size(); ++n)
    os << n << ',' << c[n] << ',' << normaliser(alpha, static_cast<long>(n)) * c[n] << '\n';
}

}  // namespace glocal
