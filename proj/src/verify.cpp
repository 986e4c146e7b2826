#include "glocal/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glocal/error.hpp"

namespace glocal {

namespace {

// About `count` log-spaced integers in [lo, hi], always including both ends.
std::vector<long> log_samples(long lo, long hi, int count) {
  std::vector<long> out;
  if (hi < lo) return out;
  const double a = std::log(double(std::max(lo, 1L))), b = std::log(double(hi));
  for (int i = 0; i < count; ++i) {
    const long v = std::lround(std::exp(a + (b - a) * i / std::max(count - 1, 1)));
    if (out.empty() || v > out.back()) out.push_back(std::clamp(v, lo, hi));
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

double h_over_slope(const InducingScheme& scheme, const DensityEstimate& dens, std::size_t r, double z) {
  const Feeder& fd = scheme.feeders()[r];
  const Branch& fr = scheme.map().branches[fd.branch];
  if (!fr.range().contains(z)) return 0.0;
  const double y = fr.inverse(z);
  if (!scheme.y_pieces()[fd.piece].contains(y)) return 0.0;
  return dens.value(y) * std::exp(-fr.log_deriv(y));
}

// Sampled orbit z_k = f_t^{-k}(z_0), k = 0..M, with the data for the backward
// recursion of the pushforward series.
struct Orbit {
  std::vector<double> z;
  std::vector<double> phi;   // sum_r h(f_r^{-1} z_k) / |f_r'|
  std::vector<double> P;     // P[k] = sum_{i=1}^k log f_t'(z_i)
  std::vector<double> H;     // H[k] = sum_{m>=k} phi[m] exp(-(P[m] - P[k]))
};

Orbit make_orbit(const InducingScheme& scheme, const DensityEstimate& dens, std::size_t t, double z0, long M,
                 bool tail_points) {
  const Tail& tl = scheme.tails()[t];
  const Branch& bt = scheme.map().branches[tl.branch];
  const auto feeders = scheme.feeders_of(t);
  Orbit o;
  const auto K = static_cast<std::size_t>(M) + 1;
  o.z.resize(K);
  if (tail_points) {
    const auto pts = scheme.tail_points(t, M);
    std::copy(pts->begin(), pts->begin() + static_cast<long>(K), o.z.begin());
  } else {
    o.z[0] = z0;
    for (std::size_t k = 1; k < K; ++k) o.z[k] = bt.inverse(o.z[k - 1]);
  }
  o.phi.assign(K, 0.0);
  o.P.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t r : feeders) o.phi[k] += h_over_slope(scheme, dens, r, o.z[k]);
    if (k > 0) o.P[k] = o.P[k - 1] + bt.log_deriv(o.z[k]);
  }
  o.H.assign(K, 0.0);
  const long half = M / 2;
  const double t_half = o.phi[half] * std::exp(o.P[M] - o.P[half]);
  o.H[M] = o.phi[M] + (tl.alpha > 0 ? fitted_remainder(t_half, double(half), o.phi[M], double(M), tl.alpha) : 0.0);
  for (long k = M - 1; k >= 0; --k) o.H[k] = o.phi[k] + std::exp(-(o.P[k + 1] - o.P[k])) * o.H[k + 1];
  return o;
}

// J_{j}(z_k) from an orbit.
double orbit_jacobian(const Orbit& o, long j, long k) {
  const long m = k + j - 1;
  return o.phi[m] * std::exp(-(o.P[m] - o.P[k])) / o.H[k];
}

}  // namespace

// ---------------------------------------------------------------- eqY

std::vector<double> tail_constants(const InducingScheme& scheme, const CellMeasures& cm) {
  std::vector<double> g;
  for (std::size_t t = 0; t < scheme.tails().size(); ++t)
    g.push_back(std::pow(double(cm.N), scheme.tails()[t].alpha) * cm.y_tail(t, cm.N));
  return g;
}

double return_tail_direct(const InducingScheme& scheme, const DensityEstimate& dens, long n) {
  if (n < 2) throw ConfigError("n", "tail starts at n = 2");
  double total = 0;
  for (std::size_t r = 0; r < scheme.feeders().size(); ++r) {
    const double zeta = scheme.feeders()[r].accumulation;
    const auto D = scheme.deep_y(r, 2);
    if (!D) continue;
    const double far = std::abs(D->lo - zeta) > std::abs(D->hi - zeta) ? D->lo : D->hi;
    const auto deep = [&](double s) {
      const double y = zeta + s * (far - zeta);
      if (!scheme.in_y(y)) return false;
      try {
        scheme.first_hit(y, n - 1);
        return false;
      } catch (const NotFound&) {
        return true;
      }
    };
    double lo = 0, hi = 1;  // deep(lo) holds, deep(hi) fails
    if (deep(hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(hi, 1e-300); ++it) {
        const double mid = 0.5 * (lo + hi);
        (deep(mid) ? lo : hi) = mid;
      }
    }
    total += dens.integrate(Interval::sorted(zeta, zeta + lo * (far - zeta)));
  }
  return total;
}

CheckResult check_eqY(const InducingScheme& scheme, const DensityEstimate& dens, const EqYOptions& opt) {
  if (opt.depth < 20) throw ConfigError("depth_cells", "eqY needs depth >= 20");
  const long N = opt.depth;
  const CellMeasures cm = extend_measure(scheme, dens, N);
  CheckResult res;
  res.name = "eqY";
  double gamma = 0;
  bool polynomial = true;
  for (std::size_t t = 0; t < scheme.tails().size(); ++t) {
    const double a = scheme.tails()[t].alpha;
    const auto s = [&](long n) { return std::pow(double(n), a) * cm.y_tail(t, n); };
    const double g = s(N);
    gamma += g;
    Table tab;
    tab.name = "plateau_p" + std::to_string(t);
    for (long n : log_samples(2, N, 60)) tab.add(double(n), s(n), g);
    res.tables.push_back(std::move(tab));

    double lo = s(N), hi = s(N), mean = 0;
    for (long n = N / 2; n <= N; ++n) {
      lo = std::min(lo, s(n));
      hi = std::max(hi, s(n));
      mean += s(n);
    }
    mean /= double(N - N / 2 + 1);
    const double osc = mean > 0 ? (hi - lo) / mean : INFINITY;
    // local exponent of the tail itself over [N/2, N]
    const double t_half = cm.y_tail(t, N / 2), t_end = cm.y_tail(t, N);
    const double beta = t_end > 0 ? std::log(t_half / t_end) / std::log(double(N) / double(N / 2)) : INFINITY;
    const std::string p = "_p" + std::to_string(t);
    res.metric("gamma" + p, g);
    res.metric("oscillation" + p, osc);
    res.metric("tail_exponent" + p, beta);
    if (!(a > 0) || !(beta < 5 * std::max(a, 1.0))) {
      polynomial = false;
      res.notes.push_back("tail " + std::to_string(t) + ": non-polynomial tail (local exponent " +
                          std::to_string(beta) + ")");
    }
    res.criterion("plateau" + p, osc < opt.oscillation_tol);
  }
  res.criterion("polynomial_tail", polynomial);

  // additivity against mu_Y(tau >= N) computed from forward orbits
  double alpha = 0;
  for (const auto& tl : scheme.tails()) alpha = std::max(alpha, tl.alpha);
  const double direct = std::pow(double(N), alpha) * return_tail_direct(scheme, dens, N);
  res.metric("gamma_sum", gamma);
  res.metric("gamma_direct", direct);
  const double add = direct > 0 ? std::abs(gamma / direct - 1) : INFINITY;
  res.metric("additivity_error", add);
  res.criterion("additivity", add < opt.additivity_tol);
  return res;
}

// ---------------------------------------------------------------- eqJ

double jacobian_target(double alpha, long j, long n) {
  return alpha * std::pow(double(n), alpha) * std::pow(double(j + n), -(alpha + 1));
}

JacobianValue jacobian(const InducingScheme& scheme, const DensityEstimate& dens, long j, long n, std::size_t tail,
                       double x, long ell_max) {
  if (j < 1 || n < 1) throw ConfigError("j", "j and n must be positive");
  if (ell_max < std::max(j, 4L)) throw ConfigError("ell_max", "must be at least j and 4");
  const Tail& tl = scheme.tails().at(tail);
  const Branch& bt = scheme.map().branches[tl.branch];
  const Interval cell = scheme.x_cell(tail, n);
  if (!cell.contains(x, 1e-8 * std::max(cell.length(), 1e-300)))
    throw StructuralError("jacobian: x is not in X_{n,p}");
  const auto feeders = scheme.feeders_of(tail);

  JacobianValue v;
  double z = x, logprod = 0, last = 0, half = 0;
  const long lhalf = ell_max / 2;
  for (long l = 1; l <= ell_max; ++l) {
    if (l > 1) {
      z = bt.inverse(z);
      logprod += bt.log_deriv(z);
    }
    double term = 0;
    for (std::size_t r : feeders) term += h_over_slope(scheme, dens, r, z);
    term *= std::exp(-logprod);
    v.density += term;
    if (l == j) v.numerator = term;
    if (l == lhalf) half = term;
    last = term;
  }
  if (tl.alpha > 0) v.density += fitted_remainder(half, double(n + lhalf - 1), last, double(n + ell_max - 1), tl.alpha);
  v.J = v.numerator / v.density;
  return v;
}

CheckResult check_eqJ(const InducingScheme& scheme, const DensityEstimate& dens, const EqJOptions& opt) {
  if (opt.j_values.empty()) throw ConfigError("j_values", "empty list");
  if (!(opt.eps > 0 && opt.eps < 1)) throw ConfigError("eps", "must lie in (0, 1)");
  for (const auto& tl : scheme.tails())
    if (!(tl.alpha > 0)) throw ConfigError("checks", "eqJ needs neutral fixed points");
  std::vector<double> eps_all = opt.eps_sweep;
  eps_all.push_back(opt.eps);
  eps_all.push_back(opt.eps / 2);
  for (double e : eps_all)
    if (!(e > 0 && e < 1)) throw ConfigError("eps_sweep", "values must lie in (0, 1)");
  const double eps_min = *std::min_element(eps_all.begin(), eps_all.end());
  const long j_max = *std::max_element(opt.j_values.begin(), opt.j_values.end());
  const long n_hi = static_cast<long>(std::ceil(double(j_max) / eps_min)) + 2;
  const long M = n_hi + j_max + static_cast<long>(std::ceil(opt.ell_factor * double(j_max)));

  CheckResult res;
  res.name = "eqJ";
  res.notes.push_back("sup over X_{n,p} from both cell ends and the pullback of the landing midpoint");

  for (std::size_t t = 0; t < scheme.tails().size(); ++t) {
    const Tail& tl = scheme.tails()[t];
    const Orbit ends = make_orbit(scheme, dens, t, tl.x0, M, true);
    const Orbit mids = make_orbit(scheme, dens, t, tl.landing.mid(), M, false);
    const std::string p = "_p" + std::to_string(t);

    // (S_j, sup-ratio) over the window eps j < n < j / eps
    const auto sweep = [&](long j, double eps, Table* prof) {
      const long lo = static_cast<long>(std::floor(eps * double(j))) + 1;
      const long hi = static_cast<long>(std::ceil(double(j) / eps)) - 1;
      double S = 0, sup = 0;
      const auto rows = prof ? log_samples(lo, hi, 80) : std::vector<long>{};
      std::size_t next = 0;
      for (long n = lo; n <= hi; ++n) {
        const double c = jacobian_target(tl.alpha, j, n);
        const double v[3] = {orbit_jacobian(ends, j, n), orbit_jacobian(ends, j, n + 1), orbit_jacobian(mids, j, n)};
        double dev = 0;
        for (double x : v) {
          dev = std::max(dev, std::abs(x - c));
          sup = std::max(sup, std::abs(x / c - 1));
        }
        S += dev;
        if (prof && next < rows.size() && rows[next] == n) {
          prof->add(double(n), v[2], c);
          ++next;
        }
      }
      return std::pair{S, sup};
    };

    Table sums, sups;
    sums.name = "S_j" + p;
    sups.name = "sup_ratio" + p;
    std::vector<double> S;
    for (long j : opt.j_values) {
      Table prof;
      prof.name = "profile_j" + std::to_string(j) + p;
      const auto [s, sup] = sweep(j, opt.eps, &prof);
      S.push_back(s);
      sums.add(double(j), s, 0.0);
      sups.add(double(j), sup, 0.0);
      res.tables.push_back(std::move(prof));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < S.size(); ++i) decreasing = decreasing && S[i] < S[i - 1];
    const double sup_last = sups.rows.back().value;
    const double sup_half = sweep(j_max, opt.eps / 2, nullptr).second;
    res.metric("sup_ratio" + p, sup_last);
    res.metric("sup_ratio_half_eps" + p, sup_half);
    for (double e : opt.eps_sweep) res.metric("sup_ratio_eps" + std::to_string(e).substr(0, 4) + p, sweep(j_max, e, nullptr).second);
    res.criterion("sup_ratio" + p, sup_last < opt.sup_tol);
    res.criterion("S_decreasing" + p, decreasing);
    res.criterion("eps_stability" + p, sup_half <= opt.eps_stability * sup_last);
    res.tables.push_back(std::move(sums));
    res.tables.push_back(std::move(sups));
  }
  return res;
}

double derivative_profile(const InducingScheme& scheme, long j, long n, std::size_t feeder) {
  if (j < 1 || n < 1) throw ConfigError("j", "j and n must be positive");
  const Feeder& fd = scheme.feeders().at(feeder);
  const Tail& tl = scheme.tails()[fd.tail];
  const Branch& bt = scheme.map().branches[tl.branch];
  const Branch& fr = scheme.map().branches[fd.branch];
  const auto pts = scheme.tail_points(fd.tail, n + j);
  double logd = 0;
  for (long i = n + 1; i <= n + j - 1; ++i) logd += bt.log_deriv((*pts)[i]);
  const double y = fr.inverse((*pts)[n + j - 1]);
  if (!scheme.y_pieces()[fd.piece].contains(y)) throw StructuralError("derivative_profile: preimage outside Y");
  logd += fr.log_deriv(y);
  return std::exp(-logd + fr.log_deriv(fd.accumulation) + (tl.alpha + 1) * std::log(double(j + n) / double(n)));
}

double jj_condition(const InducingScheme& scheme, long n, std::size_t feeder, double k_factor) {
  if (n < 1 || !(k_factor > 0)) throw ConfigError("n", "n and the window factor must be positive");
  const Feeder& fd = scheme.feeders().at(feeder);
  const Tail& tl = scheme.tails()[fd.tail];
  const Branch& bt = scheme.map().branches[tl.branch];
  const Branch& fr = scheme.map().branches[fd.branch];
  const long L = std::max(1L, static_cast<long>(k_factor * double(n)));
  const auto pts = scheme.tail_points(fd.tail, n + L);
  const double omega = std::abs(fr.deriv(fd.accumulation));
  double logprod = 0, sup = 0;
  for (long l = 1; l <= L; ++l) {
    if (l > 1) logprod += bt.log_deriv((*pts)[n + l - 1]);
    const double y = fr.inverse((*pts)[n + l - 1]);
    const double d = std::exp(logprod + fr.log_deriv(y) - (tl.alpha + 1) * std::log(double(l + n) / double(n)));
    sup = std::max(sup, std::abs(d - omega));
  }
  return sup;
}

std::pair<double, double> mass_identity(const InducingScheme& scheme, const DensityEstimate& dens, long j, long i,
                                        std::size_t tail, long ell_max, int nodes) {
  double lhs = 0;
  for (std::size_t r : scheme.feeders_of(tail))
    if (const auto c = scheme.y_cell(r, j + i)) lhs += dens.integrate(*c);
  const Interval X = scheme.x_cell(tail, i);
  const auto [gx, gw] = gauss_legendre(nodes);
  double rhs = 0;
  for (int q = 0; q < nodes; ++q) {
    const double x = X.mid() + 0.5 * X.length() * gx[q];
    const JacobianValue v = jacobian(scheme, dens, j, i, tail, x, ell_max);
    rhs += 0.5 * X.length() * gw[q] * v.J * x_density(scheme, dens, tail, i, x, ell_max);
  }
  return {lhs, rhs};
}

// ---------------------------------------------------------------- renewal sums

double cmt_sum(double alpha, long n) {
  if (!(alpha > 0 && alpha <= 1)) throw ConfigError("alpha", "must lie in (0, 1]");
  if (n < 2) throw ConfigError("n", "must be at least 2");
  long double s = 0;
  for (long j = 1; j <= n; ++j) s += std::pow((long double)j, -(long double)alpha) / normaliser(alpha, n - j);
  return static_cast<double>(s);
}

double cmt_delta_sum(double alpha, long n) {
  if (!(alpha > 0 && alpha <= 1)) throw ConfigError("alpha", "must lie in (0, 1]");
  if (n < 2) throw ConfigError("n", "must be at least 2");
  long double s = 0;
  for (long j = 1; j <= n; ++j)
    s += std::pow((long double)j, -(long double)alpha) / normaliser(alpha, n - j) / std::log(2.0L + j);
  return static_cast<double>(s);
}

double cmt_limit(double alpha) { return alpha == 1.0 ? 1.0 : std::numbers::pi / std::sin(std::numbers::pi * alpha); }

// ---------------------------------------------------------------- eqK

CheckResult check_eqK(const OperatorGrid& op, const EqKOptions& opt) {
  if (opt.n_half < 1 || opt.n_half >= opt.n_max) throw ConfigError("n_half", "must lie in [1, n_max)");
  const KrickebergProfile prof = krickeberg_profile(op, opt.n_max);
  CheckResult res;
  res.name = "eqK";
  Table K, spread;
  K.name = "K_hat";
  spread.name = "spread";
  const double K_last = prof.K[opt.n_max];
  for (long n : log_samples(1, opt.n_max, 60)) {
    K.add(double(n), prof.K[n], K_last);
    spread.add(double(n), prof.spread[n], 0.0);
  }
  const long early = std::max(1L, opt.n_max / 10);
  const double cauchy = std::abs(K_last / prof.K[opt.n_half] - 1);
  res.metric("K_hat", K_last);
  res.metric("cauchy", cauchy);
  res.metric("spread", prof.spread[opt.n_max]);
  res.metric("spread_early", prof.spread[early]);
  res.metric("mass", prof.mass[opt.n_max]);
  res.metric("leak_per_step", op.leak);
  bool positive = true;
  for (std::size_t n = 1; n < prof.K.size(); ++n) positive = positive && prof.K[n] > 0;
  res.criterion("K_positive", positive);
  res.criterion("spread_decreasing", prof.spread[opt.n_max] < prof.spread[early]);
  if (op.alpha == 1.0) {
    res.notes.push_back("log normaliser: trend only");
  } else {
    res.criterion("spread", prof.spread[opt.n_max] < opt.spread_tol);
    res.criterion("cauchy", cauchy < opt.cauchy_tol);
  }
  res.tables.push_back(std::move(K));
  res.tables.push_back(std::move(spread));
  return res;
}

// ---------------------------------------------------------------- observables

Eigen::VectorXd GlobalObservable::on_grid(const OperatorGrid& op) const {
  if (grid.size() > 0) {
    if (static_cast<std::size_t>(grid.size()) != op.size())
      throw ConfigError("observable", "grid values belong to another operator grid");
    return grid;
  }
  Eigen::VectorXd g(op.mu.size());
  g.head(static_cast<Eigen::Index>(op.y_count())).setConstant(y_value);
  for (std::size_t t = 0; t < op.tails; ++t)
    for (long n = 1; n <= op.depth; ++n) {
      const double v = level ? level(t, n) : 0.0;
      for (int k = 0; k < op.subcells; ++k) g[static_cast<Eigen::Index>(op.x_index(t, n, k))] = v;
    }
  return g;
}

GlobalObservable make_global_pwc(const InducingScheme& scheme, const DensityEstimate& dens, const PwcRule& rule,
                                 long depth, bool require_centred, double centred_tol) {
  if (depth < 20) throw ConfigError("depth_cells", "must be at least 20");
  GlobalObservable g;
  g.kind = ObservableKind::piecewise_constant;
  g.y_value = rule.y_value;
  switch (rule.kind) {
    case PwcRule::zero:
      g.label = "zero";
      g.level = [](std::size_t, long) { return 0.0; };
      break;
    case PwcRule::constant: {
      g.label = "constant";
      const double v = rule.value;
      g.level = [v](std::size_t, long) { return v; };
      break;
    }
    case PwcRule::alternating:
      g.label = "alternating";
      g.level = [](std::size_t, long n) { return n % 2 ? -1.0 : 1.0; };
      break;
    case PwcRule::block: {
      if (rule.block_length < 1) throw ConfigError("block", "must be positive");
      g.label = "block" + std::to_string(rule.block_length);
      const long L = rule.block_length;
      g.level = [L](std::size_t, long n) { return ((n - 1) / L) % 2 ? -1.0 : 1.0; };
      break;
    }
    case PwcRule::custom: {
      if (rule.table.empty()) throw ConfigError("table", "custom rule needs values");
      g.label = "custom";
      const auto tab = rule.table;
      g.level = [tab](std::size_t, long n) { return tab[static_cast<std::size_t>(n - 1) % tab.size()]; };
      break;
    }
  }
  g.bound = std::abs(rule.y_value);
  const long period = rule.kind == PwcRule::custom ? long(rule.table.size()) : 2 * std::max(rule.block_length, 1L);
  for (std::size_t t = 0; t < scheme.tails().size(); ++t)
    for (long n = 1; n <= period; ++n) g.bound = std::max(g.bound, std::abs(g.level(t, n)));

  // partial sums of i^-alpha g_i with g_i = sum_p gamma_p g_{i,p}
  const CellMeasures cm = extend_measure(scheme, dens, depth);
  const auto gamma = tail_constants(scheme, cm);
  double alpha = 0, gsum = 0;
  for (std::size_t t = 0; t < gamma.size(); ++t) {
    alpha = std::max(alpha, scheme.tails()[t].alpha);
    gsum += gamma[t];
  }
  long double num = 0, den = 0;
  for (long i = std::max(1L, scheme.n0()); i <= depth; ++i) {
    const long double w = std::pow((long double)i, -(long double)alpha);
    for (std::size_t t = 0; t < gamma.size(); ++t) num += w * gamma[t] * g.level(t, i);
    den += w * gsum;
  }
  g.centred_residual = static_cast<double>(std::abs(num)) / normaliser(alpha, depth);
  const bool finite = !(alpha > 0);
  g.centred = rule.kind == PwcRule::zero || (!finite && g.centred_residual <= centred_tol);
  g.mean = g.centred ? 0.0 : (den > 0 ? static_cast<double>(num / den) : 0.0);
  if (rule.kind == PwcRule::constant) g.mean = rule.value;
  if (require_centred && !g.centred)
    throw ConfigError("observable", g.label + " is not centred: partial-sum residual " +
                                        std::to_string(g.centred_residual));
  return g;
}

GlobalObservable make_pw_meanzero(const OperatorGrid& op, const std::function<double(std::size_t, long, int)>& profile) {
  const int K = op.subcells;
  if (!profile && K < 2) throw ConfigError("operator_subcells", "mean-zero observables need at least two sub-cells");
  GlobalObservable g;
  g.kind = ObservableKind::piecewise_meanzero;
  g.label = profile ? "meanzero" : "meanzero_halves";
  g.grid = Eigen::VectorXd::Zero(op.mu.size());
  for (std::size_t t = 0; t < op.tails; ++t)
    for (long n = 1; n <= op.depth; ++n) {
      double mass = 0, first = 0;
      for (int k = 0; k < K; ++k) {
        const double m = op.mu[static_cast<Eigen::Index>(op.x_index(t, n, k))];
        mass += m;
        if (2 * k < K) first += m;
      }
      if (!profile) {
        const double c = mass - first > 0 ? first / (mass - first) : 0.0;
        for (int k = 0; k < K; ++k) g.grid[static_cast<Eigen::Index>(op.x_index(t, n, k))] = 2 * k < K ? 1.0 : -c;
        continue;
      }
      double avg = 0;
      for (int k = 0; k < K; ++k) avg += profile(t, n, k) * op.mu[static_cast<Eigen::Index>(op.x_index(t, n, k))];
      avg = mass > 0 ? avg / mass : 0.0;
      for (int k = 0; k < K; ++k) g.grid[static_cast<Eigen::Index>(op.x_index(t, n, k))] = profile(t, n, k) - avg;
    }
  g.bound = g.grid.size() ? g.grid.cwiseAbs().maxCoeff() : 0.0;
  g.centred = true;
  g.mean = 0.0;
  return g;
}

CheckResult glocal_experiment(const OperatorGrid& op, const std::vector<GlobalObservable>& obs,
                              const GlocalOptions& opt) {
  if (opt.n_max < 2 || opt.n_compare < 1 || opt.n_compare >= opt.n_max)
    throw ConfigError("n_max", "need 1 <= n_compare < n_max");
  CheckResult res;
  res.name = "glocal";
  std::vector<Eigen::VectorXd> grids;
  for (const auto& g : obs) grids.push_back(g.on_grid(op));
  grids.push_back(Eigen::VectorXd::Ones(op.mu.size()));
  const auto c = correlations(op, grids, opt.n_max);
  const auto& mass = c.back();
  const auto y = static_cast<Eigen::Index>(op.y_count());
  const double mu_y = op.mu.head(y).sum();
  const bool finite = !(op.alpha > 0);
  if (finite) res.notes.push_back("finite measure: limit mu(Y) int g dmu / mu(X)");
  res.metric("lost_mass", 1 - mass[opt.n_max]);

  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& g = obs[i];
    const double target = finite ? mu_y * grids[i].dot(op.mu) / op.mu.sum() : g.mean * mu_y;
    // mass past the truncation sits on deep levels, where a global observable averages to its mean
    std::vector<double> ci(c[i].size());
    for (std::size_t n = 0; n < ci.size(); ++n) ci[n] = c[i][n] + (finite ? 0.0 : g.mean * (1 - mass[n]));
    const std::string s = "_" + g.label;
    Table tab;
    tab.name = "c_n" + s;
    for (long n : log_samples(1, opt.n_max, 80)) tab.add(double(n), ci[n], target);
    res.tables.push_back(std::move(tab));
    const auto err = [&](long n) { return std::abs(ci[n] - target); };
    res.metric("target" + s, target);
    res.metric("c_final" + s, ci[opt.n_max]);
    res.metric("c_compare" + s, ci[opt.n_compare]);
    if (opt.trend_only) {
      Table dy;
      dy.name = "dyadic" + s;
      bool mono = true;
      double prev = INFINITY;
      for (long n = 1; n <= opt.n_max; n *= 2) {
        dy.add(double(n), ci[n], target);
        if (n >= opt.trend_from) {
          mono = mono && err(n) <= prev;
          prev = err(n);
        }
      }
      res.tables.push_back(std::move(dy));
      res.criterion("dyadic_trend" + s, mono);
    } else {
      res.criterion("limit" + s, err(opt.n_max) < opt.tol);
      if (g.centred && err(opt.n_compare) > opt.tol * 1e-3)
        res.criterion("decay" + s, err(opt.n_max) < err(opt.n_compare));
    }
  }
  return res;
}

}  // namespace glocal
