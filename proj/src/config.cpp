#include "glocal/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "glocal/error.hpp"

namespace glocal {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key, "not a number: '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  // accept 1e5 style integers, reject fractions
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 9e15) throw ConfigError(key, "not an integer: '" + v + "'");
  return static_cast<long>(x);
}

std::string num(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + fmt(v[i]);
  return s;
}

std::string str(const std::string& s) { return s; }

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = [] {
    std::map<std::string, Setter> s;
    const auto opt = [&](const char* key, std::optional<double> FamilySpec::*field) {
      s[key] = [=](ExperimentConfig& c, const std::string& v) { c.map.*field = to_double(key, v); };
    };
    const auto real = [&](const char* key, double ExperimentConfig::*field) {
      s[key] = [=](ExperimentConfig& c, const std::string& v) { c.*field = to_double(key, v); };
    };
    const auto integer = [&](const char* key, long ExperimentConfig::*field) {
      s[key] = [=](ExperimentConfig& c, const std::string& v) { c.*field = to_long(key, v); };
    };
    s["family"] = [](ExperimentConfig& c, const std::string& v) { c.map.tag = v; };
    opt("alpha", &FamilySpec::alpha);
    opt("b", &FamilySpec::b);
    opt("eta1", &FamilySpec::eta1);
    opt("eta", &FamilySpec::eta);
    opt("kappa", &FamilySpec::kappa);
    s["cuts"] = [](ExperimentConfig& c, const std::string& v) {
      c.map.cuts.clear();
      for (const auto& x : split(v, ',')) c.map.cuts.push_back(to_double("cuts", x));
    };
    s["branch"] = [](ExperimentConfig& c, const std::string& v) {
      std::istringstream is(v);
      BranchSpec b;
      std::string lo, hi, x;
      if (!(is >> b.type >> lo >> hi)) throw ConfigError("branch", "expected: type lo hi coeffs...");
      b.lo = to_double("branch", lo);
      b.hi = to_double("branch", hi);
      while (is >> x) b.coeffs.push_back(to_double("branch", x));
      c.map.branches.push_back(std::move(b));
    };
    integer("depth_cells", &ExperimentConfig::depth_cells);
    s["ulam_cells"] = [](ExperimentConfig& c, const std::string& v) {
      const long m = to_long("ulam_cells", v);
      if (m <= 0) throw ConfigError("ulam_cells", "must be positive");
      c.ulam_cells = static_cast<std::size_t>(m);
    };
    integer("tau_cap", &ExperimentConfig::tau_cap);
    integer("operator_depth", &ExperimentConfig::operator_depth);
    s["operator_subcells"] = [](ExperimentConfig& c, const std::string& v) {
      c.operator_subcells = static_cast<int>(to_long("operator_subcells", v));
    };
    integer("n_max", &ExperimentConfig::n_max);
    integer("n_compare", &ExperimentConfig::n_compare);
    real("ell_factor", &ExperimentConfig::ell_factor);
    s["j_values"] = [](ExperimentConfig& c, const std::string& v) {
      c.j_values.clear();
      for (const auto& x : split(v, ',')) c.j_values.push_back(to_long("j_values", x));
    };
    real("eps", &ExperimentConfig::eps);
    s["eps_sweep"] = [](ExperimentConfig& c, const std::string& v) {
      c.eps_sweep.clear();
      for (const auto& x : split(v, ',')) c.eps_sweep.push_back(to_double("eps_sweep", x));
    };
    s["observables"] = [](ExperimentConfig& c, const std::string& v) { c.observables = split(v, ','); };
    s["require_centred"] = [](ExperimentConfig& c, const std::string& v) {
      if (v != "true" && v != "false") throw ConfigError("require_centred", "expected true or false");
      c.require_centred = v == "true";
    };
    real("oscillation_tol", &ExperimentConfig::oscillation_tol);
    real("additivity_tol", &ExperimentConfig::additivity_tol);
    real("sup_tol", &ExperimentConfig::sup_tol);
    real("spread_tol", &ExperimentConfig::spread_tol);
    real("cauchy_tol", &ExperimentConfig::cauchy_tol);
    real("glocal_tol", &ExperimentConfig::glocal_tol);
    real("centred_tol", &ExperimentConfig::centred_tol);
    real("max_leak", &ExperimentConfig::max_leak);
    real("fprime_tol", &ExperimentConfig::fprime_tol);
    real("cmt_tol", &ExperimentConfig::cmt_tol);
    real("measure_tol", &ExperimentConfig::measure_tol);
    real("eps_stability", &ExperimentConfig::eps_stability);
    s["trend"] = [](ExperimentConfig& c, const std::string& v) { c.trend = v; };
    s["checks"] = [](ExperimentConfig& c, const std::string& v) { c.checks = split(v, ','); };
    s["out"] = [](ExperimentConfig& c, const std::string& v) { c.out = v; };
    return s;
  }();
  return m;
}

void check_observable(const std::string& o) {
  const auto colon = o.find(':');
  const std::string kind = o.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : o.substr(colon + 1);
  if (kind == "alternating" || kind == "zero" || kind == "meanzero") {
    if (colon != std::string::npos) throw ConfigError("observables", "'" + kind + "' takes no argument");
  } else if (kind == "constant") {
    to_double("observables", arg);
  } else if (kind == "block") {
    if (to_long("observables", arg) < 1) throw ConfigError("observables", "block length must be >= 1");
  } else if (kind == "custom") {
    const auto vals = split(arg, ';');
    if (vals.empty()) throw ConfigError("observables", "custom needs a table g1;g2;...");
    for (const auto& v : vals) to_double("observables", v);
  } else {
    throw ConfigError("observables", "unknown observable '" + o + "'");
  }
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> k{"eqY", "eqJ", "eqK", "glocal", "fprime", "cmt", "measure"};
  return k;
}

void validate(const ExperimentConfig& c) {
  make_family(c.map);  // ConfigError names the map parameter
  const auto positive = [](const char* key, double v) {
    if (!(v > 0)) throw ConfigError(key, "must be positive");
  };
  const auto unit = [](const char* key, double v) {
    if (!(v > 0 && v < 1)) throw ConfigError(key, "must lie in (0,1), got " + num(v));
  };
  positive("depth_cells", double(c.depth_cells));
  positive("ulam_cells", double(c.ulam_cells));
  positive("tau_cap", double(c.tau_cap));
  positive("operator_depth", double(c.operator_depth));
  positive("operator_subcells", c.operator_subcells);
  positive("n_max", double(c.n_max));
  positive("n_compare", double(c.n_compare));
  positive("ell_factor", c.ell_factor);
  if (c.n_compare >= c.n_max) throw ConfigError("n_compare", "must be below n_max");
  if (c.j_values.empty()) throw ConfigError("j_values", "empty");
  for (std::size_t i = 0; i < c.j_values.size(); ++i) {
    positive("j_values", double(c.j_values[i]));
    if (i && c.j_values[i] <= c.j_values[i - 1]) throw ConfigError("j_values", "must be ascending");
  }
  unit("eps", c.eps);
  for (double e : c.eps_sweep) unit("eps_sweep", e);
  unit("oscillation_tol", c.oscillation_tol);
  unit("additivity_tol", c.additivity_tol);
  unit("sup_tol", c.sup_tol);
  unit("spread_tol", c.spread_tol);
  unit("cauchy_tol", c.cauchy_tol);
  unit("glocal_tol", c.glocal_tol);
  unit("centred_tol", c.centred_tol);
  unit("max_leak", c.max_leak);
  unit("fprime_tol", c.fprime_tol);
  unit("cmt_tol", c.cmt_tol);
  unit("measure_tol", c.measure_tol);
  if (!(c.eps_stability > 1)) throw ConfigError("eps_stability", "must exceed 1");
  if (c.trend != "auto" && c.trend != "true" && c.trend != "false")
    throw ConfigError("trend", "expected auto, true or false");
  for (const auto& o : c.observables) check_observable(o);
  std::set<std::string> seen;
  for (const auto& k : c.checks) {
    if (std::find(known_checks().begin(), known_checks().end(), k) == known_checks().end())
      throw ConfigError("checks", "unknown check '" + k + "'");
    if (!seen.insert(k).second) throw ConfigError("checks", "duplicate check '" + k + "'");
  }
  if (c.out.empty()) throw ConfigError("out", "empty");
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    if (key != "branch" && !seen.insert(key).second) throw ConfigError(key, "given twice");
    it->second(c, value);
  }
  validate(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot read " + path);
  return parse_config(f);
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << "\n"; };
  kv("family", c.map.tag);
  if (c.map.alpha) kv("alpha", num(*c.map.alpha));
  if (c.map.b) kv("b", num(*c.map.b));
  if (c.map.eta1) kv("eta1", num(*c.map.eta1));
  if (c.map.eta) kv("eta", num(*c.map.eta));
  if (c.map.kappa) kv("kappa", num(*c.map.kappa));
  if (!c.map.cuts.empty()) kv("cuts", join(c.map.cuts, num));
  for (const auto& b : c.map.branches)
    kv("branch", b.type + " " + num(b.lo) + " " + num(b.hi) + (b.coeffs.empty() ? "" : " ") + join(b.coeffs, num, " "));
  kv("depth_cells", num(double(c.depth_cells)));
  kv("ulam_cells", num(double(c.ulam_cells)));
  kv("tau_cap", num(double(c.tau_cap)));
  kv("operator_depth", num(double(c.operator_depth)));
  kv("operator_subcells", num(c.operator_subcells));
  kv("n_max", num(double(c.n_max)));
  kv("n_compare", num(double(c.n_compare)));
  kv("ell_factor", num(c.ell_factor));
  kv("j_values", join(c.j_values, [](long j) { return num(double(j)); }));
  kv("eps", num(c.eps));
  kv("eps_sweep", join(c.eps_sweep, num));
  kv("observables", join(c.observables, str));
  kv("require_centred", c.require_centred ? "true" : "false");
  kv("oscillation_tol", num(c.oscillation_tol));
  kv("additivity_tol", num(c.additivity_tol));
  kv("sup_tol", num(c.sup_tol));
  kv("spread_tol", num(c.spread_tol));
  kv("cauchy_tol", num(c.cauchy_tol));
  kv("glocal_tol", num(c.glocal_tol));
  kv("centred_tol", num(c.centred_tol));
  kv("max_leak", num(c.max_leak));
  kv("fprime_tol", num(c.fprime_tol));
  kv("cmt_tol", num(c.cmt_tol));
  kv("measure_tol", num(c.measure_tol));
  kv("eps_stability", num(c.eps_stability));
  kv("trend", c.trend);
  kv("checks", join(c.checks, str));
  kv("out", c.out);
  return os.str();
}

bool trend_only(const ExperimentConfig& c) {
  if (c.trend == "true") return true;
  if (c.trend == "false") return false;
  return make_family(c.map).alpha() == 1.0;
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_text(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace glocal
