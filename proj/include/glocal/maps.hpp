#pragma once

// Parametric intermittent interval maps: branches with exact first and second
// derivatives, bracketed inverse branches and the built-in families.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "glocal/interval.hpp"

namespace glocal {

enum class Orientation { preserving, reversing };

/// Branch with a neutral fixed point xi: f(x) - x ~ b |x - xi|^(1 + 1/alpha).
struct NeutralKind {
  double fixed_point = 0.0;
  double alpha = 1.0;
  double b = 1.0;
  double kappa = 2.0;
};

/// Uniformly expanding branch, |f'| >= rho.
struct UniformKind {
  double rho = 1.0;
};

using BranchKind = std::variant<NeutralKind, UniformKind>;

/// f(x) = x + s (b |u|^p + c |u|^q) - shift with u = x - xi and s = sign(u).
struct PowerFormula {
  double xi = 0.0;
  double b = 0.0;
  double p = 2.0;
  double c = 0.0;
  double q = 3.0;
  double shift = 0.0;
};

/// f(x) = slope x + offset.
struct AffineFormula {
  double slope = 1.0;
  double offset = 0.0;
};

/// f(x) = (a x + b) / (c x + d).
struct MobiusFormula {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
};

using BranchFormula = std::variant<PowerFormula, AffineFormula, MobiusFormula>;

class Branch {
 public:
  Branch(Interval domain, BranchFormula formula, BranchKind kind);

  const Interval& domain() const { return domain_; }
  const BranchFormula& formula() const { return formula_; }
  const BranchKind& kind() const { return kind_; }
  bool is_neutral() const { return std::holds_alternative<NeutralKind>(kind_); }
  const NeutralKind* neutral() const { return std::get_if<NeutralKind>(&kind_); }

  Orientation orientation() const { return orientation_; }
  /// Image of the domain.
  Interval range() const { return range_; }

  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  /// log |f'(x)|, via log1p near a neutral fixed point.
  double log_deriv(double x) const;
  /// f(x) - x, evaluated without the cancellation of eval(x) - x.
  double displacement(double x) const;

  /// x in domain with f(x) = y. Throws OutOfRange when y is not in range().
  double inverse(double y) const;

 private:
  double side_at(double x, double xi) const;

  Interval domain_;
  BranchFormula formula_;
  BranchKind kind_;
  Orientation orientation_;
  Interval range_;
};

enum class Family { lsv2, qbranch, pm_mod1, farey, thaler, linear, custom };

/// Branch description accepted from config files for the custom family.
struct BranchSpec {
  std::string type;  // "power", "affine" or "mobius"
  double lo = 0.0, hi = 0.0;
  std::vector<double> coeffs;
  // power branches: alpha is read from coeffs; neutral when shift == 0 and xi in the domain
  bool operator==(const BranchSpec&) const = default;
};

/// Parameters of make_family. Unset optionals take family defaults.
struct FamilySpec {
  std::string tag = "lsv";
  std::optional<double> alpha;
  std::optional<double> b;
  std::optional<double> eta1;
  std::optional<double> eta;
  std::optional<double> kappa;
  std::vector<double> cuts;
  std::vector<BranchSpec> branches;
  bool operator==(const FamilySpec&) const = default;
};

struct MapModel {
  Family family = Family::custom;
  std::string tag;
  std::vector<Branch> branches;
  /// Invariant interval is X = [0, eta].
  double eta = 1.0;
  /// Parameters echoed into reports.
  std::map<std::string, double> params;

  Interval space() const { return {0.0, eta}; }
  /// Common exponent of the neutral branches, or 0 when there are none.
  double alpha() const;
  std::size_t branch_index(double x) const;
  const Branch& branch_at(double x) const { return branches[branch_index(x)]; }
  double eval(double x) const { return branch_at(x).eval(x); }
  double deriv(double x) const { return branch_at(x).deriv(x); }
};

MapModel make_family(const FamilySpec& spec);

/// Sampled check of the branch and map invariants; throws ConfigError.
void validate_map(const MapModel& map);

/// Largest sampled |f''| / f'^2. delta-neighbourhoods of branch endpoints are
/// skipped only where f'' is unbounded.
double adler_constant(const MapModel& map, double delta, int samples_per_branch = 20001);
double adler_constant(const Branch& branch, double delta, int samples = 20001);

struct FamilyInfo {
  std::string tag;
  std::string parameters;
  std::string notes;
};

std::vector<FamilyInfo> family_table();

}  // namespace glocal
