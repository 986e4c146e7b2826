#pragma once

// First-hit structure of a map on an inducing set Y: tails at the fixed
// points outside Y, the cells X_{n,p} and Y_{n,r}, and the induced map.

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "glocal/interval.hpp"
#include "glocal/maps.hpp"

namespace glocal {

/// One side of a fixed point that lies outside Y. Points of the tail region
/// between the fixed point and x1 travel towards Y along the branch.
struct Tail {
  std::size_t branch = 0;
  double fixed_point = 0.0;
  int side = 1;        // +1 when the tail region lies above the fixed point
  double alpha = 0.0;  // 0 for an expanding fixed point
  double b = 0.0;
  double x0 = 0.0;  // f(x1), the far end of the landing interval
  double x1 = 0.0;  // boundary of Y nearest the fixed point
  Interval landing;  // [x1, x0] sorted; always inside Y
  Interval region;   // closure of the tail region, between fixed point and x1
};

/// A branch r of the index set A feeding tail psi(r): Y_{n,r} = Y ∩ f_r^{-1} X_{n-1,psi(r)}.
struct Feeder {
  std::size_t tail = 0;
  std::size_t branch = 0;
  double accumulation = 0.0;  // zeta_r = f_r^{-1}(fixed point)
  std::size_t piece = 0;      // Y piece containing the Y_{n,r}
};

/// Part of Y mapped into Y by one application of a branch.
struct DirectPiece {
  std::size_t branch = 0;
  Interval source;  // subset of Y
  Interval image;   // subset of Y
};

struct XCell {
  std::size_t tail = 0;
  long n = 1;
};
struct YCell {
  std::size_t feeder = 0;
  long n = 2;
};
using CellId = std::variant<XCell, YCell>;

/// x_n for one tail together with the scale estimates b' = x_N N^alpha and
/// b'' = (x_{N-1} - x_N) N^(alpha+1). Distances are measured from the fixed point.
struct TailTable {
  std::size_t tail = 0;
  double alpha = 0.0;
  std::vector<double> x;
  double b_prime_estimate = 0.0;
  double b_second_estimate = 0.0;
  double b_prime = 0.0;   // alpha^alpha b^-alpha
  double b_second = 0.0;  // alpha^(alpha+1) b^-alpha
};

class InducingScheme {
 public:
  explicit InducingScheme(MapModel map);

  const MapModel& map() const { return map_; }
  const std::vector<Interval>& y_pieces() const { return pieces_; }
  /// Sorted points of Y where the grid must have a node.
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<Tail>& tails() const { return tails_; }
  const std::vector<Feeder>& feeders() const { return feeders_; }
  std::vector<std::size_t> feeders_of(std::size_t tail) const;
  const std::vector<DirectPiece>& direct_pieces() const { return direct_; }

  bool in_y(double x) const;
  std::optional<std::size_t> piece_of(double x) const;
  double y_leb() const;

  /// x_0 .. x_N of a tail. The snapshot is immutable; the cache grows on demand.
  std::shared_ptr<const std::vector<double>> tail_points(std::size_t tail, long N) const;
  double tail_point(std::size_t tail, long n) const;
  TailTable tail_sequence(std::size_t tail, long N) const;

  /// X_{n,t} = [x_{n+1}, x_n] sorted, n >= 1.
  Interval x_cell(std::size_t tail, long n) const;
  /// Leb(X_{n,t}) without the cancellation of x_n - x_{n+1}.
  double x_cell_leb(std::size_t tail, long n) const;
  /// Y_{n,r}, n >= 2; empty when f_r misses X_{n-1}.
  std::optional<Interval> y_cell(std::size_t feeder, long n) const;
  /// Union of Y_{j,r} over j >= n, n >= 2.
  std::optional<Interval> deep_y(std::size_t feeder, long n) const;
  /// Preimage under f_r of a subset of the tail region, clipped to the piece.
  std::optional<Interval> feeder_preimage(std::size_t feeder, const Interval& in_region) const;

  /// Smallest n such that every Y_{m+1,r} maps onto X_{m,psi(r)} for m >= n.
  long n0() const { return n0_; }

  long first_hit(double x, long cap) const;
  std::pair<double, long> induced_map(double y, long cap) const;
  double cell_measure_leb(const CellId& id) const;

  /// Rows (kind, n, index, left, right, leb) for n <= N.
  void write_cells_csv(std::ostream& os, long N) const;

 private:
  void choose_y();
  void find_tails();
  void find_feeders();
  void find_direct();
  void detect_n0();

  MapModel map_;
  std::vector<Interval> pieces_;
  std::vector<double> breaks_;
  std::vector<Tail> tails_;
  std::vector<Feeder> feeders_;
  std::vector<DirectPiece> direct_;
  long n0_ = 1;

  mutable std::mutex cache_mutex_;
  mutable std::vector<std::shared_ptr<const std::vector<double>>> cache_;
};

/// Period-2 point of the two-branch two_sided map in (0, 1/2).
double period_two_point(const MapModel& map);

}  // namespace glocal
