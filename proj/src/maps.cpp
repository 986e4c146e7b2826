#include "glocal/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "glocal/error.hpp"

namespace glocal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

double signed_power_part(const PowerFormula& f, double u, double s) {
  const double a = std::abs(u);
  double v = f.b * std::pow(a, f.p);
  if (f.c != 0.0) v += f.c * std::pow(a, f.q);
  return s * v;
}

}  // namespace

Branch::Branch(Interval domain, BranchFormula formula, BranchKind kind)
    : domain_(domain), formula_(std::move(formula)), kind_(std::move(kind)) {
  const double a = eval(domain_.lo);
  const double b = eval(domain_.hi);
  orientation_ = b >= a ? Orientation::preserving : Orientation::reversing;
  range_ = Interval::sorted(a, b);
}

double Branch::side_at(double x, double xi) const {
  if (x > xi) return 1.0;
  if (x < xi) return -1.0;
  // at the fixed point itself use the side the domain lies on
  return domain_.hi > xi ? 1.0 : -1.0;
}

double Branch::eval(double x) const {
  return std::visit(
      overloaded{
          [&](const PowerFormula& f) {
            const double u = x - f.xi;
            return x + signed_power_part(f, u, side_at(x, f.xi)) - f.shift;
          },
          [&](const AffineFormula& f) { return f.slope * x + f.offset; },
          [&](const MobiusFormula& f) { return (f.a * x + f.b) / (f.c * x + f.d); },
      },
      formula_);
}

double Branch::deriv(double x) const {
  return std::visit(
      overloaded{
          [&](const PowerFormula& f) {
            const double a = std::abs(x - f.xi);
            double v = 1.0 + f.b * f.p * std::pow(a, f.p - 1.0);
            if (f.c != 0.0) v += f.c * f.q * std::pow(a, f.q - 1.0);
            return v;
          },
          [&](const AffineFormula& f) { return f.slope; },
          [&](const MobiusFormula& f) {
            const double den = f.c * x + f.d;
            return (f.a * f.d - f.b * f.c) / (den * den);
          },
      },
      formula_);
}

double Branch::deriv2(double x) const {
  return std::visit(
      overloaded{
          [&](const PowerFormula& f) {
            const double a = std::abs(x - f.xi);
            double v = f.b * f.p * (f.p - 1.0) * std::pow(a, f.p - 2.0);
            if (f.c != 0.0) v += f.c * f.q * (f.q - 1.0) * std::pow(a, f.q - 2.0);
            return side_at(x, f.xi) * v;
          },
          [&](const AffineFormula&) { return 0.0; },
          [&](const MobiusFormula& f) {
            const double den = f.c * x + f.d;
            return -2.0 * f.c * (f.a * f.d - f.b * f.c) / (den * den * den);
          },
      },
      formula_);
}

double Branch::log_deriv(double x) const {
  if (const auto* f = std::get_if<PowerFormula>(&formula_)) {
    const double a = std::abs(x - f->xi);
    double v = f->b * f->p * std::pow(a, f->p - 1.0);
    if (f->c != 0.0) v += f->c * f->q * std::pow(a, f->q - 1.0);
    return std::log1p(v);
  }
  return std::log(std::abs(deriv(x)));
}

double Branch::displacement(double x) const {
  return std::visit(
      overloaded{
          [&](const PowerFormula& f) {
            return signed_power_part(f, x - f.xi, side_at(x, f.xi)) - f.shift;
          },
          [&](const AffineFormula& f) { return (f.slope - 1.0) * x + f.offset; },
          [&](const MobiusFormula& f) {
            return ((f.a - f.d) * x + f.b - f.c * x * x) / (f.c * x + f.d);
          },
      },
      formula_);
}

double Branch::inverse(double y) const {
  const double tol = 4.0 * kEps * std::max(1.0, std::abs(y));
  if (!range_.contains(y, tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "inverse_branch: y=" << y << " outside range [" << range_.lo << ", " << range_.hi << "]";
    throw OutOfRange(os.str());
  }
  const bool increasing = orientation_ == Orientation::preserving;
  if (y <= range_.lo) return increasing ? domain_.lo : domain_.hi;
  if (y >= range_.hi) return increasing ? domain_.hi : domain_.lo;

  auto clamp = [&](double x) { return std::clamp(x, domain_.lo, domain_.hi); };

  if (const auto* f = std::get_if<AffineFormula>(&formula_)) return clamp((y - f->offset) / f->slope);
  if (const auto* f = std::get_if<MobiusFormula>(&formula_))
    return clamp((f->d * y - f->b) / (f->a - f->c * y));

  // Bracketed Newton: the bracket always holds the root, and any Newton step
  // leaving it is replaced by bisection.
  double lo = domain_.lo;
  double hi = domain_.hi;
  double x = y - displacement(std::clamp(y, lo, hi));
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double r = (x - y) + displacement(x);
    if (r == 0.0) return x;
    if ((r > 0.0) == increasing)
      hi = x;
    else
      lo = x;
    const double d = deriv(x);
    double xn = x - r / d;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 2.0 * kEps * std::abs(x) || hi - lo <= 2.0 * kEps * std::abs(x)) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

double MapModel::alpha() const {
  for (const auto& br : branches)
    if (const auto* n = br.neutral()) return n->alpha;
  return 0.0;
}

std::size_t MapModel::branch_index(double x) const {
  for (std::size_t k = 0; k + 1 < branches.size(); ++k)
    if (x < branches[k].domain().hi) return k;
  return branches.size() - 1;
}

namespace {

double adler_on(const Branch& br, double delta, int samples) {
  const Interval d = br.domain();
  auto ratio = [&](double x) {
    const double fp = br.deriv(x);
    return std::abs(br.deriv2(x)) / (fp * fp);
  };
  const bool skip_lo = !std::isfinite(ratio(d.lo));
  const bool skip_hi = !std::isfinite(ratio(d.hi));
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = d.lo + d.length() * static_cast<double>(i) / (samples - 1);
    if (skip_lo && x - d.lo < delta) continue;
    if (skip_hi && d.hi - x < delta) continue;
    const double r = ratio(x);
    if (std::isfinite(r)) m = std::max(m, r);
  }
  return m;
}

}  // namespace

double adler_constant(const Branch& branch, double delta, int samples) {
  return adler_on(branch, delta, samples);
}

double adler_constant(const MapModel& map, double delta, int samples_per_branch) {
  double m = 0.0;
  for (const auto& br : map.branches) m = std::max(m, adler_on(br, delta, samples_per_branch));
  return m;
}

void validate_map(const MapModel& map) {
  if (map.branches.empty()) throw ConfigError("branches", "map has no branches");
  const double tol = 1e-12;
  if (std::abs(map.branches.front().domain().lo) > tol)
    throw ConfigError("branches", "branch domains must start at 0");
  for (std::size_t k = 0; k + 1 < map.branches.size(); ++k) {
    if (std::abs(map.branches[k].domain().hi - map.branches[k + 1].domain().lo) > tol)
      throw ConfigError("branches", "branch domains do not tile [0,1]");
  }
  if (std::abs(map.branches.back().domain().hi - map.eta) > tol)
    throw ConfigError("branches", "branch domains must end at the invariant interval endpoint");

  constexpr int n = 2001;
  for (std::size_t k = 0; k < map.branches.size(); ++k) {
    const Branch& br = map.branches[k];
    const Interval d = br.domain();
    if (!(d.length() > 0)) throw ConfigError("branches", "empty branch domain");
    const double sgn = br.orientation() == Orientation::preserving ? 1.0 : -1.0;
    double prev = br.eval(d.lo);
    for (int i = 1; i < n; ++i) {
      const double x = d.lo + d.length() * i / (n - 1);
      const double v = br.eval(x);
      if (!(sgn * (v - prev) > 0)) throw ConfigError("branches", "branch " + std::to_string(k) + " is not strictly monotone");
      if (v < -tol || v > map.eta + tol)
        throw ConfigError("branches", "branch " + std::to_string(k) + " leaves the invariant interval");
      prev = v;
    }
    if (const auto* u = std::get_if<UniformKind>(&br.kind())) {
      for (int i = 0; i < n; ++i) {
        const double x = d.lo + d.length() * i / (n - 1);
        if (std::abs(br.deriv(x)) < u->rho * (1 - 1e-12))
          throw ConfigError("branches", "branch " + std::to_string(k) + " is not expanding at rate rho");
      }
    }
    if (const auto* nk = br.neutral()) {
      if (!(nk->alpha > 0 && nk->alpha <= 1)) throw ConfigError("alpha", "alpha must lie in (0,1]");
      if (std::abs(br.eval(nk->fixed_point) - nk->fixed_point) > tol)
        throw ConfigError("branches", "neutral branch does not fix its fixed point");
      for (int i = 0; i < n; ++i) {
        const double x = d.lo + d.length() * i / (n - 1);
        if (x != nk->fixed_point && !(br.log_deriv(x) > 0.0))
          throw ConfigError("branches", "neutral branch must expand away from its fixed point");
      }
    }
  }
}

namespace {

double require_alpha(const FamilySpec& s) {
  if (!s.alpha) throw ConfigError("alpha", "required");
  const double a = *s.alpha;
  if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha", "must lie in (0,1], got " + std::to_string(a));
  return a;
}

double default_kappa(const FamilySpec& s, double alpha) {
  const double k = s.kappa.value_or(1.0 / alpha + 0.5);
  if (!(k > 1.0 / alpha)) throw ConfigError("kappa", "must exceed 1/alpha");
  return k;
}

std::vector<double> require_increasing(const std::vector<double>& cuts, const std::string& field) {
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (!(cuts[i] > 0.0 && cuts[i] < 1.0)) throw ConfigError(field, "cut points must lie in (0,1)");
    if (i > 0 && !(cuts[i] > cuts[i - 1])) throw ConfigError(field, "cut points must be strictly increasing");
  }
  return cuts;
}

// Neutral first branch x + b x^(1+1/alpha) + c x^(1+kappa) on [0, eta1] with f(eta1) = eta.
Branch neutral_first_branch(double alpha, double b, double kappa, double eta1, double eta) {
  const double p = 1.0 + 1.0 / alpha;
  const double q = 1.0 + kappa;
  const double gap = eta - eta1 - b * std::pow(eta1, p);
  const double cc = std::abs(gap) < 1e-13 ? 0.0 : gap / std::pow(eta1, q);
  return Branch({0.0, eta1}, PowerFormula{0.0, b, p, cc, q, 0.0}, NeutralKind{0.0, alpha, b, kappa});
}

double min_abs_deriv(const Branch& br) {
  double m = std::numeric_limits<double>::infinity();
  const Interval d = br.domain();
  for (int i = 0; i <= 2000; ++i) m = std::min(m, std::abs(br.deriv(d.lo + d.length() * i / 2000.0)));
  return m;
}

Branch uniform(Interval dom, BranchFormula f) {
  Branch tmp(dom, f, UniformKind{1.0});
  return Branch(dom, std::move(f), UniformKind{min_abs_deriv(tmp)});
}

MapModel make_lsv2(const FamilySpec& s, bool plain) {
  const double alpha = require_alpha(s);
  const double kappa = default_kappa(s, alpha);
  const double b = s.b.value_or(std::pow(2.0, 1.0 / alpha));
  if (!(b > 0)) throw ConfigError("b", "must be positive");
  const double eta1 = s.eta1.value_or(0.5);
  if (!(eta1 > 0 && eta1 < 1)) throw ConfigError("eta1", "must lie in (0,1)");
  const double p = 1.0 + 1.0 / alpha;
  const double eta = s.eta.value_or(eta1 + b * std::pow(eta1, p));
  if (!(eta > eta1 && eta <= 1.0 + 1e-15))
    throw ConfigError("eta", "must lie in (eta1, 1]; with the default eta = f0(eta1) this constrains b");
  // f1 maps [eta1, 1] affinely onto [0, 1]
  const double slope = 1.0 / (1.0 - eta1);
  if (!(slope * (eta - eta1) > eta1)) throw ConfigError("eta", "must exceed f1^{-1}(eta1)");

  MapModel m;
  m.family = Family::lsv2;
  m.tag = plain ? "lsv" : "lsv2";
  m.eta = std::min(eta, 1.0);
  m.branches.push_back(neutral_first_branch(alpha, b, kappa, eta1, m.eta));
  m.branches.push_back(uniform({eta1, m.eta}, AffineFormula{slope, -slope * eta1}));
  m.params = {{"alpha", alpha}, {"b", b}, {"eta1", eta1}, {"eta", m.eta}, {"kappa", kappa}};
  return m;
}

MapModel make_qbranch(const FamilySpec& s) {
  const double alpha = require_alpha(s);
  const double kappa = default_kappa(s, alpha);
  std::vector<double> cuts = s.cuts.empty() ? std::vector<double>{0.5, 0.75} : s.cuts;
  require_increasing(cuts, "cuts");
  const double eta1 = cuts.front();
  const double p = 1.0 + 1.0 / alpha;
  const double eta = s.eta.value_or(1.0);
  if (!(eta > cuts.back() && eta <= 1.0)) throw ConfigError("eta", "must lie in (last cut, 1]");
  const double b = s.b.value_or((eta - eta1) / std::pow(eta1, p));
  if (!(b > 0)) throw ConfigError("b", "must be positive");

  MapModel m;
  m.family = Family::qbranch;
  m.tag = "qbranch";
  m.eta = eta;
  m.branches.push_back(neutral_first_branch(alpha, b, kappa, eta1, eta));
  std::vector<double> edges = cuts;
  edges.push_back(1.0);
  for (std::size_t r = 0; r + 1 < edges.size(); ++r) {
    const double lo = edges[r];
    const double hi = std::min(edges[r + 1], eta);
    const double slope = eta / (edges[r + 1] - lo);
    if (!(slope > 1.0)) throw ConfigError("cuts", "expanding branches need slope > 1");
    m.branches.push_back(uniform({lo, hi}, AffineFormula{slope, -slope * lo}));
  }
  m.params = {{"alpha", alpha}, {"b", b}, {"eta", eta}, {"kappa", kappa}, {"Q", double(cuts.size())}};
  for (std::size_t i = 0; i < cuts.size(); ++i) m.params["cut" + std::to_string(i + 1)] = cuts[i];
  return m;
}

MapModel make_linear(const FamilySpec& s) {
  std::vector<double> cuts = s.cuts.empty() ? std::vector<double>{0.4, 0.7} : s.cuts;
  require_increasing(cuts, "cuts");
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(1.0);
  MapModel m;
  m.family = Family::linear;
  m.tag = "linear";
  for (std::size_t r = 0; r + 1 < edges.size(); ++r) {
    const double slope = 1.0 / (edges[r + 1] - edges[r]);
    m.branches.push_back(uniform({edges[r], edges[r + 1]}, AffineFormula{slope, -slope * edges[r]}));
  }
  m.params = {{"Q", double(cuts.size())}};
  for (std::size_t i = 0; i < cuts.size(); ++i) m.params["cut" + std::to_string(i + 1)] = cuts[i];
  return m;
}

double solve_increasing(auto&& g, double lo, double hi, double target) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= kEps * hi) break;
  }
  return 0.5 * (lo + hi);
}

MapModel make_pm_mod1(const FamilySpec& s) {
  const double alpha = require_alpha(s);
  const double kappa = default_kappa(s, alpha);
  const double b = s.b.value_or(1.0);
  if (!(b >= 1.0)) throw ConfigError("b", "must be at least 1");
  const double p = 1.0 + 1.0 / alpha;
  const auto lift = [&](double x) { return x + b * std::pow(x, p); };
  const int nexp = static_cast<int>(std::ceil(b));
  std::vector<double> edges{0.0};
  for (int k = 1; k <= nexp; ++k) edges.push_back(solve_increasing(lift, 0.0, 1.0, double(k)));
  edges.push_back(1.0);

  MapModel m;
  m.family = Family::pm_mod1;
  m.tag = "pm_mod1";
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const PowerFormula f{0.0, b, p, 0.0, 1.0 + kappa, double(k)};
    const Interval dom{edges[k], edges[k + 1]};
    if (k == 0)
      m.branches.emplace_back(dom, f, NeutralKind{0.0, alpha, b, kappa});
    else
      m.branches.push_back(uniform(dom, f));
  }
  m.params = {{"alpha", alpha}, {"b", b}, {"kappa", kappa}, {"branches", double(m.branches.size())}};
  return m;
}

MapModel make_farey() {
  MapModel m;
  m.family = Family::farey;
  m.tag = "farey";
  m.branches.emplace_back(Interval{0.0, 0.5}, MobiusFormula{1.0, 0.0, -1.0, 1.0}, NeutralKind{0.0, 1.0, 1.0, 2.0});
  m.branches.push_back(uniform({0.5, 1.0}, MobiusFormula{-1.0, 1.0, 1.0, 0.0}));
  m.params = {{"alpha", 1.0}, {"b", 1.0}};
  return m;
}

MapModel make_thaler(const FamilySpec& s, bool two_sided) {
  const double alpha = require_alpha(s);
  const double kappa = default_kappa(s, alpha);
  std::vector<double> cuts = two_sided || s.cuts.empty() ? std::vector<double>{0.5} : s.cuts;
  if (two_sided && !s.cuts.empty()) cuts = s.cuts;
  require_increasing(cuts, "cuts");
  const double p = 1.0 + 1.0 / alpha;
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(1.0);
  const std::size_t d = edges.size() - 1;

  MapModel m;
  m.family = Family::thaler;
  m.tag = two_sided ? "two_sided" : "thaler_d";
  for (std::size_t k = 0; k < d; ++k) {
    const double lo = edges[k];
    const double hi = edges[k + 1];
    double xi = 0;
    double b = 0;
    if (k == 0) {
      xi = 0.0;
      b = (1.0 - hi) / std::pow(hi, p);
    } else if (k + 1 == d) {
      xi = 1.0;
      b = lo / std::pow(1.0 - lo, p);
    } else {
      // equal coefficient on both sides of the interior fixed point
      auto gap = [&](double z) { return std::log(lo) - p * std::log(z - lo) - std::log(1.0 - hi) + p * std::log(hi - z); };
      double a = lo, c = hi;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + c);
        if (gap(mid) > 0)
          a = mid;
        else
          c = mid;
      }
      xi = 0.5 * (a + c);
      b = lo / std::pow(xi - lo, p);
    }
    m.branches.emplace_back(Interval{lo, hi}, PowerFormula{xi, b, p, 0.0, 1.0 + kappa, 0.0},
                            NeutralKind{xi, alpha, b, kappa});
    m.params["xi" + std::to_string(k + 1)] = xi;
    m.params["b" + std::to_string(k + 1)] = b;
  }
  m.params["alpha"] = alpha;
  m.params["kappa"] = kappa;
  m.params["d"] = double(d);
  return m;
}

MapModel make_custom(const FamilySpec& s) {
  if (s.branches.empty()) throw ConfigError("branch", "custom family needs at least one branch");
  MapModel m;
  m.family = Family::custom;
  m.tag = "custom";
  for (std::size_t k = 0; k < s.branches.size(); ++k) {
    const BranchSpec& bs = s.branches[k];
    const Interval dom{bs.lo, bs.hi};
    const auto need = [&](std::size_t n) {
      if (bs.coeffs.size() < n)
        throw ConfigError("branch", "branch " + std::to_string(k) + " (" + bs.type + ") needs " + std::to_string(n) + " coefficients");
    };
    if (!(bs.hi > bs.lo)) throw ConfigError("branch", "branch " + std::to_string(k) + " has an empty domain");
    if (bs.type == "affine") {
      need(2);
      m.branches.push_back(uniform(dom, AffineFormula{bs.coeffs[0], bs.coeffs[1]}));
    } else if (bs.type == "mobius") {
      need(4);
      const MobiusFormula f{bs.coeffs[0], bs.coeffs[1], bs.coeffs[2], bs.coeffs[3]};
      const double den_lo = f.c * bs.lo + f.d, den_hi = f.c * bs.hi + f.d;
      if (den_lo * den_hi <= 0) throw ConfigError("branch", "mobius branch has a pole in its domain");
      Branch tmp(dom, f, UniformKind{1.0});
      const bool fixes_lo = std::abs(tmp.eval(bs.lo) - bs.lo) < 1e-14 && std::abs(tmp.deriv(bs.lo) - 1) < 1e-12;
      if (fixes_lo)
        m.branches.emplace_back(dom, f, NeutralKind{bs.lo, 1.0, std::abs(tmp.deriv2(bs.lo)) / 2, 2.0});
      else
        m.branches.push_back(uniform(dom, f));
    } else if (bs.type == "power") {
      // xi, b, alpha [, c, kappa, shift]
      need(3);
      const double xi = bs.coeffs[0], b = bs.coeffs[1], alpha = bs.coeffs[2];
      if (!(alpha > 0 && alpha <= 1)) throw ConfigError("alpha", "must lie in (0,1], got " + std::to_string(alpha));
      if (!(b > 0)) throw ConfigError("b", "must be positive");
      const double c = bs.coeffs.size() > 3 ? bs.coeffs[3] : 0.0;
      const double kappa = bs.coeffs.size() > 4 ? bs.coeffs[4] : 1.0 / alpha + 0.5;
      const double shift = bs.coeffs.size() > 5 ? bs.coeffs[5] : 0.0;
      if (!(kappa > 1.0 / alpha)) throw ConfigError("kappa", "must exceed 1/alpha");
      const PowerFormula f{xi, b, 1.0 + 1.0 / alpha, c, 1.0 + kappa, shift};
      if (shift == 0.0 && dom.contains(xi))
        m.branches.emplace_back(dom, f, NeutralKind{xi, alpha, b, kappa});
      else
        m.branches.push_back(uniform(dom, f));
    } else {
      throw ConfigError("branch", "unknown branch type '" + bs.type + "'");
    }
  }
  m.eta = m.branches.back().domain().hi;
  return m;
}

}  // namespace

MapModel make_family(const FamilySpec& spec) {
  MapModel m;
  const std::string& t = spec.tag;
  if (t == "lsv")
    m = make_lsv2(spec, true);
  else if (t == "lsv2")
    m = make_lsv2(spec, false);
  else if (t == "qbranch")
    m = make_qbranch(spec);
  else if (t == "pm_mod1")
    m = make_pm_mod1(spec);
  else if (t == "farey")
    m = make_farey();
  else if (t == "two_sided")
    m = make_thaler(spec, true);
  else if (t == "thaler_d")
    m = make_thaler(spec, false);
  else if (t == "linear")
    m = make_linear(spec);
  else if (t == "custom")
    m = make_custom(spec);
  else
    throw ConfigError("family", "unknown family '" + t + "'");
  validate_map(m);
  return m;
}

std::vector<FamilyInfo> family_table() {
  return {
      {"lsv", "alpha in (0,1]", "f0(x)=x(1+2^(1/alpha) x^(1/alpha)) on [0,1/2], f1(x)=2x-1"},
      {"lsv2", "alpha in (0,1], b>0, eta1 in (0,1), eta in (f1^-1(eta1),1], kappa>1/alpha",
       "two branches, f0 neutral with f0(eta1)=eta, f1 affine onto [0,1]; nonMarkov when eta<1"},
      {"qbranch", "alpha in (0,1], b>0, cuts eta1<...<etaQ, eta",
       "neutral f0 on [0,eta1] plus Q affine branches with f_r(eta_r)=0"},
      {"pm_mod1", "alpha in (0,1], b>=1 (non-integer allowed)",
       "x + b x^(1+1/alpha) mod 1; number of branches ceil(b) besides the neutral one"},
      {"farey", "alpha=1 fixed", "f0(x)=x/(1-x) on [0,1/2], f1(x)=(1-x)/x on (1/2,1]; orientation-reversing f1"},
      {"two_sided", "alpha in (0,1]", "d=2 neutral fixed points at 0 and 1: x+b x^(1+1/alpha), x-b(1-x)^(1+1/alpha)"},
      {"thaler_d", "alpha in (0,1], cuts c1<...<c(d-1), d>=2", "d full branches, one neutral fixed point each"},
      {"linear", "cuts", "all-linear full branches (finite-measure control)"},
      {"custom", "branch = power|affine|mobius lo hi coeffs...", "user coefficient tables"},
  };
}

}  // namespace glocal
