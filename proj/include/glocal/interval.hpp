#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace glocal {

/// Closed interval [lo, hi] of the real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval sorted(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(double x, double tol) const { return lo - tol <= x && x <= hi + tol; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  if (hi < lo) return std::nullopt;
  return Interval{lo, hi};
}

inline double overlap_length(const Interval& a, const Interval& b) {
  return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

}  // namespace glocal
