#include "glocal/inducing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "glocal/error.hpp"

namespace glocal {

namespace {

constexpr double kTouch = 1e-13;

std::vector<Interval> merge_pieces(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& p : v) {
    if (!(p.length() > 0)) continue;
    if (!out.empty() && p.lo <= out.back().hi + kTouch)
      out.back().hi = std::max(out.back().hi, p.hi);
    else
      out.push_back(p);
  }
  return out;
}

// Preimage under a branch of the part of `target` inside its range.
std::optional<Interval> branch_preimage(const Branch& br, const Interval& target) {
  const auto j = intersect(target, br.range());
  if (!j) return std::nullopt;
  return Interval::sorted(br.inverse(j->lo), br.inverse(j->hi));
}

bool all_neutral(const MapModel& m) {
  return std::all_of(m.branches.begin(), m.branches.end(), [](const Branch& b) { return b.is_neutral(); });
}

}  // namespace

double period_two_point(const MapModel& map) {
  if (map.branches.size() != 2) throw StructuralError("period-2 orbit: map needs exactly two branches");
  const Branch& f0 = map.branches[0];
  const Branch& f1 = map.branches[1];
  const double c = f0.domain().hi;
  if (!f0.range().contains(c)) throw StructuralError("period-2 orbit: f0 does not cover the cut point");
  double lo = f0.inverse(c);
  double hi = c;
  auto g = [&](double x) { return f1.eval(f0.eval(x)) - x; };
  const double glo = g(lo);
  const double ghi = g(hi);
  if (!(glo < 0 && ghi > 0))
    throw StructuralError("period-2 orbit: no sign change of f1(f0(x)) - x on [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  for (int i = 0; i < 200 && hi - lo > 0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

InducingScheme::InducingScheme(MapModel map) : map_(std::move(map)) {
  choose_y();
  find_tails();
  find_feeders();
  find_direct();
  cache_.resize(tails_.size());

  breaks_.clear();
  for (const auto& p : pieces_) {
    breaks_.push_back(p.lo);
    breaks_.push_back(p.hi);
  }
  for (const auto& br : map_.branches) {
    for (double e : {br.domain().lo, br.domain().hi})
      if (in_y(e)) breaks_.push_back(e);
  }
  for (const auto& f : feeders_) breaks_.push_back(f.accumulation);
  for (const auto& t : tails_) {
    breaks_.push_back(t.x0);
    breaks_.push_back(t.x1);
  }
  for (const auto& d : direct_) {
    breaks_.push_back(d.source.lo);
    breaks_.push_back(d.source.hi);
  }
  std::sort(breaks_.begin(), breaks_.end());
  std::vector<double> uniq;
  for (double b : breaks_)
    if (uniq.empty() || b - uniq.back() > kTouch) uniq.push_back(b);
  breaks_ = std::move(uniq);

  detect_n0();
}

void InducingScheme::choose_y() {
  const auto& br = map_.branches;
  const bool thaler = map_.family == Family::thaler || (map_.family == Family::custom && all_neutral(map_));
  if (thaler && br.size() == 2) {
    const double y0 = period_two_point(map_);
    pieces_ = {Interval::sorted(y0, map_.eval(y0))};
    return;
  }
  if (thaler) {
    std::vector<Interval> v;
    for (const auto& b : br) {
      const auto pre = branch_preimage(b, b.domain());
      if (!pre) {
        v.push_back(b.domain());
        continue;
      }
      v.push_back({b.domain().lo, pre->lo});
      v.push_back({pre->hi, b.domain().hi});
    }
    pieces_ = merge_pieces(v);
    return;
  }
  const Branch& first = br.front();
  const bool starts_at_fixed_point = std::abs(first.eval(0.0)) < 1e-14;
  if (br.size() < 2 || !starts_at_fixed_point)
    throw StructuralError("no inducing-set rule for this map: expected a fixed point at 0 on the first branch");
  pieces_ = {{first.domain().hi, map_.eta}};
}

bool InducingScheme::in_y(double x) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const Interval& p) { return p.contains(x); });
}

std::optional<std::size_t> InducingScheme::piece_of(double x) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    if (pieces_[i].contains(x, kTouch)) return i;
  return std::nullopt;
}

double InducingScheme::y_leb() const {
  double s = 0;
  for (const auto& p : pieces_) s += p.length();
  return s;
}

void InducingScheme::find_tails() {
  for (std::size_t k = 0; k < map_.branches.size(); ++k) {
    const Branch& br = map_.branches[k];
    std::vector<std::pair<double, const NeutralKind*>> fixed;
    if (const auto* nk = br.neutral()) {
      fixed.emplace_back(nk->fixed_point, nk);
    } else {
      for (double e : {br.domain().lo, br.domain().hi})
        if (std::abs(br.eval(e) - e) < 1e-14) fixed.emplace_back(e, nullptr);
    }
    for (const auto& [xi, nk] : fixed) {
      if (in_y(xi)) continue;
      for (int side : {1, -1}) {
        if (side > 0 && !(br.domain().hi > xi)) continue;
        if (side < 0 && !(br.domain().lo < xi)) continue;
        double best = 0;
        bool found = false;
        for (const auto& p : pieces_) {
          for (double e : {p.lo, p.hi}) {
            if (!(side * (e - xi) > 0) || !br.domain().contains(e, kTouch)) continue;
            if (!found || std::abs(e - xi) < std::abs(best - xi)) best = e;
            found = true;
          }
        }
        if (!found)
          throw StructuralError("fixed point " + std::to_string(xi) + " of branch " + std::to_string(k) +
                                " has no boundary of Y on its side");
        Tail t;
        t.branch = k;
        t.fixed_point = xi;
        t.side = side;
        t.alpha = nk ? nk->alpha : 0.0;
        t.b = nk ? nk->b : 0.0;
        t.x1 = best;
        t.x0 = br.eval(best);
        t.landing = Interval::sorted(t.x1, t.x0);
        t.region = Interval::sorted(xi, t.x1);
        const auto pc = piece_of(t.landing.lo);
        if (!pc || !pieces_[*pc].contains(t.landing.hi, kTouch))
          throw StructuralError("landing interval of the tail at " + std::to_string(xi) + " is not inside Y");
        tails_.push_back(t);
      }
    }
  }
  if (tails_.empty()) throw StructuralError("map has no fixed point outside Y");
}

void InducingScheme::find_feeders() {
  for (std::size_t t = 0; t < tails_.size(); ++t) {
    const Tail& tl = tails_[t];
    for (std::size_t k = 0; k < map_.branches.size(); ++k) {
      if (k == tl.branch) continue;
      const Branch& br = map_.branches[k];
      const Interval rg = br.range();
      const double inner = std::min(rg.hi, tl.region.hi) - std::max(rg.lo, tl.region.lo);
      if (!(inner > 0)) continue;
      if (!rg.contains(tl.fixed_point, kTouch))
        throw StructuralError("branch " + std::to_string(k) + " covers part of a tail region without reaching its fixed point");
      Feeder f;
      f.tail = t;
      f.branch = k;
      f.accumulation = br.inverse(std::clamp(tl.fixed_point, rg.lo, rg.hi));
      const auto pc = piece_of(f.accumulation);
      if (!pc) throw StructuralError("accumulation point of branch " + std::to_string(k) + " lies outside Y");
      f.piece = *pc;
      feeders_.push_back(f);
    }
    if (feeders_of(t).empty()) throw StructuralError("tail at " + std::to_string(tl.fixed_point) + " has no feeding branch");
  }
}

void InducingScheme::find_direct() {
  for (std::size_t k = 0; k < map_.branches.size(); ++k) {
    const Branch& br = map_.branches[k];
    for (const auto& target : pieces_) {
      const auto src = branch_preimage(br, target);
      if (!src || !(src->length() > 0)) continue;
      for (const auto& q : pieces_) {
        const auto s = intersect(*src, q);
        if (!s || !(s->length() > 0)) continue;
        direct_.push_back({k, *s, Interval::sorted(br.eval(s->lo), br.eval(s->hi))});
      }
    }
  }
}

std::vector<std::size_t> InducingScheme::feeders_of(std::size_t tail) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < feeders_.size(); ++r)
    if (feeders_[r].tail == tail) out.push_back(r);
  return out;
}

std::shared_ptr<const std::vector<double>> InducingScheme::tail_points(std::size_t tail, long N) const {
  if (tail >= tails_.size()) throw OutOfRange("unknown tail " + std::to_string(tail));
  if (N < 0) throw OutOfRange("negative tail depth");
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto& slot = cache_[tail];
  if (slot && static_cast<long>(slot->size()) > N) return slot;
  auto v = std::make_shared<std::vector<double>>();
  if (slot) *v = *slot;
  if (v->empty()) {
    v->push_back(tails_[tail].x0);
    v->push_back(tails_[tail].x1);
  }
  const Branch& br = map_.branches[tails_[tail].branch];
  const std::size_t want = std::max<std::size_t>(N + 1, slot ? 2 * slot->size() : 0);
  v->reserve(want);
  while (v->size() < want) v->push_back(br.inverse(v->back()));
  slot = std::move(v);
  return slot;
}

double InducingScheme::tail_point(std::size_t tail, long n) const { return (*tail_points(tail, n))[n]; }

TailTable InducingScheme::tail_sequence(std::size_t tail, long N) const {
  if (N < 10) throw ConfigError("N", "tail tables need N >= 10");
  const auto pts = tail_points(tail, N);
  const Tail& tl = tails_[tail];
  TailTable tt;
  tt.tail = tail;
  tt.alpha = tl.alpha;
  tt.x.assign(pts->begin(), pts->begin() + N + 1);
  const double a = tl.alpha;
  const double dN = std::abs(tt.x[N] - tl.fixed_point);
  tt.b_prime_estimate = dN * std::pow(double(N), a);
  tt.b_second_estimate = x_cell_leb(tail, N - 1) * std::pow(double(N), a + 1);
  if (a > 0) {
    tt.b_prime = std::pow(a, a) * std::pow(tl.b, -a);
    tt.b_second = std::pow(a, a + 1) * std::pow(tl.b, -a);
  }
  return tt;
}

Interval InducingScheme::x_cell(std::size_t tail, long n) const {
  if (n < 0) throw OutOfRange("cell depth must be non-negative");
  const auto pts = tail_points(tail, n + 1);
  return Interval::sorted((*pts)[n + 1], (*pts)[n]);
}

double InducingScheme::x_cell_leb(std::size_t tail, long n) const {
  const double x = tail_point(tail, n + 1);
  return std::abs(map_.branches[tails_[tail].branch].displacement(x));
}

std::optional<Interval> InducingScheme::feeder_preimage(std::size_t feeder, const Interval& in_region) const {
  const Feeder& f = feeders_.at(feeder);
  const auto pre = branch_preimage(map_.branches[f.branch], in_region);
  if (!pre) return std::nullopt;
  return intersect(*pre, pieces_[f.piece]);
}

std::optional<Interval> InducingScheme::y_cell(std::size_t feeder, long n) const {
  if (n < 2) throw OutOfRange("Y_{n,r} is indexed from n = 2");
  return feeder_preimage(feeder, x_cell(feeders_.at(feeder).tail, n - 1));
}

std::optional<Interval> InducingScheme::deep_y(std::size_t feeder, long n) const {
  if (n < 2) throw OutOfRange("Y_{n,r} is indexed from n = 2");
  const Tail& tl = tails_[feeders_.at(feeder).tail];
  return feeder_preimage(feeder, Interval::sorted(tl.fixed_point, tail_point(feeders_[feeder].tail, n - 1)));
}

void InducingScheme::detect_n0() {
  constexpr long kScan = 4096;
  long last_bad = 0;
  for (long n = 1; n <= kScan; ++n) {
    bool ok = true;
    for (std::size_t r = 0; r < feeders_.size() && ok; ++r) {
      const Feeder& f = feeders_[r];
      const Branch& br = map_.branches[f.branch];
      const Interval xc = x_cell(f.tail, n);
      if (!br.range().contains(xc)) {
        ok = false;
        break;
      }
      const Interval pre = Interval::sorted(br.inverse(xc.lo), br.inverse(xc.hi));
      if (!pieces_[f.piece].contains(pre)) {
        ok = false;
        break;
      }
      const Interval img = Interval::sorted(br.eval(pre.lo), br.eval(pre.hi));
      if (std::abs(img.lo - xc.lo) > 1e-9 || std::abs(img.hi - xc.hi) > 1e-9) ok = false;
    }
    if (!ok) last_bad = n;
  }
  if (last_bad == kScan) throw StructuralError("Y_{n+1,r} never maps onto X_n within the scanned depth");
  n0_ = last_bad + 1;
}

long InducingScheme::first_hit(double x, long cap) const {
  if (!map_.space().contains(x)) throw OutOfRange("first_hit: x outside X");
  double y = x;
  for (long n = 1; n <= cap; ++n) {
    y = map_.eval(y);
    if (in_y(y)) return n;
  }
  throw NotFound("first_hit: no return to Y within the cap", cap);
}

std::pair<double, long> InducingScheme::induced_map(double y, long cap) const {
  if (!in_y(y)) throw OutOfRange("induced_map: point outside Y");
  double z = y;
  for (long n = 1; n <= cap; ++n) {
    z = map_.eval(z);
    if (in_y(z)) return {z, n};
  }
  throw NotFound("induced_map: no return to Y within the cap", cap);
}

double InducingScheme::cell_measure_leb(const CellId& id) const {
  if (const auto* x = std::get_if<XCell>(&id)) {
    if (x->tail >= tails_.size() || x->n < 1) throw OutOfRange("unknown X cell");
    return x_cell_leb(x->tail, x->n);
  }
  const auto& y = std::get<YCell>(id);
  if (y.feeder >= feeders_.size() || y.n < 2) throw OutOfRange("unknown Y cell");
  const auto c = y_cell(y.feeder, y.n);
  return c ? c->length() : 0.0;
}

void InducingScheme::write_cells_csv(std::ostream& os, long N) const {
  os << "kind,n,index,left,right,leb\n";
  os.precision(17);
  for (std::size_t t = 0; t < tails_.size(); ++t)
    for (long n = 1; n <= N; ++n) {
      const Interval c = x_cell(t, n);
      os << "X," << n << ',' << t << ',' << c.lo << ',' << c.hi << ',' << x_cell_leb(t, n) << '\n';
    }
  for (std::size_t r = 0; r < feeders_.size(); ++r)
    for (long n = 2; n <= N; ++n) {
      const auto c = y_cell(r, n);
      if (!c) continue;
      os << "Y," << n << ',' << r << ',' << c->lo << ',' << c->hi << ',' << c->length() << '\n';
    }
}

}  // namespace glocal
