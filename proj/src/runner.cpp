#include "glocal/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <sstream>

#include "glocal/error.hpp"
#include "glocal/verify.hpp"

namespace glocal {

namespace {

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

bool selected(const std::vector<std::string>& checks, const std::string& name) {
  return std::find(checks.begin(), checks.end(), name) != checks.end();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

CheckResult check_fprime(const InducingScheme& scheme, const ExperimentConfig& cfg) {
  CheckResult res;
  res.name = "fprime";
  const long j = cfg.j_values.back();
  for (std::size_t r = 0; r < scheme.feeders().size(); ++r) {
    const std::string s = "_r" + std::to_string(r);
    const double ratio = derivative_profile(scheme, j, j, r);
    res.metric("ratio" + s, ratio);
    res.criterion("ratio" + s, std::abs(ratio - 1) <= cfg.fprime_tol);
    Table jj;
    jj.name = "jj_condition" + s;
    bool decreasing = true;
    double prev = INFINITY;
    for (long n : cfg.j_values) {
      const double v = jj_condition(scheme, n, r, 1.0 / cfg.eps);
      jj.add(double(n), v, 0.0);
      decreasing = decreasing && v <= prev;
      prev = v;
    }
    res.tables.push_back(std::move(jj));
    res.criterion("jj_decreasing" + s, decreasing);
  }
  return res;
}

CheckResult check_cmt(double alpha, const ExperimentConfig& cfg) {
  CheckResult res;
  res.name = "cmt";
  if (!(alpha > 0)) throw ConfigError("checks", "renewal sums need alpha in (0,1]");
  const long n = alpha < 1 ? 100000 : 1000000;
  const double s = cmt_sum(alpha, n), lim = cmt_limit(alpha);
  res.metric("sum", s);
  res.metric("limit", lim);
  res.criterion("limit", std::abs(s - lim) < cfg.cmt_tol);
  Table d;
  d.name = "delta_sum";
  for (long m : {10000L, 100000L, 1000000L}) d.add(double(m), cmt_delta_sum(alpha, m), 0.0);
  res.metric("delta_ratio", d.rows.back().value / d.rows.front().value);
  res.criterion("delta_halving", d.rows.back().value <= 0.5 * d.rows.front().value);
  res.tables.push_back(std::move(d));
  return res;
}

CheckResult check_measure(const InducingScheme& scheme, const DensityEstimate& dens, const ExperimentConfig& cfg) {
  CheckResult res;
  res.name = "measure";
  const CellMeasures cm = extend_measure(scheme, dens, 2);
  double x1 = 0;
  for (std::size_t t = 0; t < scheme.tails().size(); ++t)
    x1 += x_cell_measure_series(scheme, dens, t, 1, 20 * cfg.depth_cells, 24);
  const double defect = cm.y_direct + x1 - 1.0;
  res.metric("mu_Y1", cm.y_direct);
  res.metric("mu_X1", x1);
  res.metric("defect", defect);
  res.criterion("identity", std::abs(defect) < cfg.measure_tol);
  return res;
}

struct ObservableToken {
  std::optional<PwcRule> rule;  // empty: default mean-zero profile
};

ObservableToken parse_observable(const std::string& o) {
  const auto colon = o.find(':');
  const std::string kind = o.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : o.substr(colon + 1);
  ObservableToken tok;
  if (kind == "meanzero") return tok;
  PwcRule r;
  if (kind == "zero") {
    r.kind = PwcRule::zero;
  } else if (kind == "alternating") {
    r.kind = PwcRule::alternating;
  } else if (kind == "constant") {
    r.kind = PwcRule::constant;
    r.value = std::stod(arg);
  } else if (kind == "block") {
    r.kind = PwcRule::block;
    r.block_length = std::stol(arg);
  } else if (kind == "custom") {
    r.kind = PwcRule::custom;
    std::istringstream is(arg);
    std::string v;
    while (std::getline(is, v, ';')) r.table.push_back(std::stod(v));
  } else {
    throw ConfigError("observables", "unknown observable '" + o + "'");
  }
  tok.rule = r;
  return tok;
}

}  // namespace

VerificationReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  const std::vector<std::string> checks = opt.checks.empty() ? cfg.checks : opt.checks;
  for (const auto& c : checks)
    if (!selected(known_checks(), c)) throw ConfigError("checks", "unknown check '" + c + "'");

  VerificationReport rep;
  rep.meta.emplace_back("version", version);
  rep.meta.emplace_back("config_hash", config_hash(cfg));
  rep.meta.emplace_back("family", cfg.map.tag);

  MapModel map = stage("map", [&] { return make_family(cfg.map); });
  const double alpha = map.alpha();
  rep.meta.emplace_back("alpha", fmt(alpha));
  const InducingScheme scheme = stage("scheme", [&] { return InducingScheme(std::move(map)); });
  rep.meta.emplace_back("tails", std::to_string(scheme.tails().size()));
  rep.meta.emplace_back("feeders", std::to_string(scheme.feeders().size()));

  UlamOptions uo;
  uo.cells = cfg.ulam_cells;
  uo.tau_cap = cfg.tau_cap;
  const DensityEstimate dens = stage("density", [&] { return ulam_induced(scheme, uo); });
  rep.meta.emplace_back("ulam_cells", std::to_string(dens.size()));
  rep.meta.emplace_back("ulam_residual", fmt(dens.residual()));
  rep.meta.emplace_back("depth_cells", std::to_string(cfg.depth_cells));

  // checks that need only the density; independent, so they may run concurrently
  std::vector<std::pair<std::string, std::function<CheckResult()>>> light;
  if (selected(checks, "eqY"))
    light.emplace_back("eqY", [&] {
      EqYOptions o;
      o.depth = cfg.depth_cells;
      o.oscillation_tol = cfg.oscillation_tol;
      o.additivity_tol = cfg.additivity_tol;
      return check_eqY(scheme, dens, o);
    });
  if (selected(checks, "eqJ"))
    light.emplace_back("eqJ", [&] {
      EqJOptions o;
      o.j_values = cfg.j_values;
      o.eps = cfg.eps;
      o.eps_sweep = cfg.eps_sweep;
      o.ell_factor = cfg.ell_factor;
      o.sup_tol = cfg.sup_tol;
      o.eps_stability = cfg.eps_stability;
      CheckResult r = check_eqJ(scheme, dens, o);
      r.notes.push_back("sup over X_{n,p} approximated by J at both cell ends and at the pullback of the landing midpoint");
      return r;
    });
  if (selected(checks, "fprime")) light.emplace_back("fprime", [&] { return check_fprime(scheme, cfg); });
  if (selected(checks, "cmt")) light.emplace_back("cmt", [&] { return check_cmt(alpha, cfg); });
  if (selected(checks, "measure")) light.emplace_back("measure", [&] { return check_measure(scheme, dens, cfg); });

  std::map<std::string, CheckResult> done;
  const std::size_t width = static_cast<std::size_t>(std::max(1, opt.threads));
  for (std::size_t b = 0; b < light.size(); b += width) {
    const std::size_t e = std::min(light.size(), b + width);
    if (width == 1) {
      done[light[b].first] = stage(light[b].first, light[b].second);
      continue;
    }
    std::vector<std::future<CheckResult>> fut;
    for (std::size_t i = b; i < e; ++i)
      fut.push_back(std::async(std::launch::async, [&, i] { return stage(light[i].first, light[i].second); }));
    for (std::size_t i = b; i < e; ++i) done[light[i].first] = fut[i - b].get();
  }

  if (selected(checks, "eqK") || selected(checks, "glocal")) {
    OperatorOptions oo;
    oo.depth = cfg.operator_depth;
    oo.subcells = cfg.operator_subcells;
    oo.max_leak = cfg.max_leak;
    const OperatorGrid op = stage("operator", [&] { return build_operator(scheme, dens, oo); });
    rep.meta.emplace_back("operator_depth", std::to_string(op.depth));
    rep.meta.emplace_back("operator_cells", std::to_string(op.size()));
    rep.meta.emplace_back("operator_leak", fmt(op.leak));

    if (selected(checks, "eqK"))
      done["eqK"] = stage("eqK", [&] {
        EqKOptions o;
        o.n_max = cfg.n_max;
        o.n_half = cfg.n_max / 2;
        o.spread_tol = cfg.spread_tol;
        o.cauchy_tol = cfg.cauchy_tol;
        return check_eqK(op, o);
      });
    if (selected(checks, "glocal")) {
      const auto obs = stage("observables", [&] {
        std::vector<GlobalObservable> v;
        std::map<std::string, int> used;
        for (const auto& token : cfg.observables) {
          const ObservableToken t = parse_observable(token);
          GlobalObservable g = t.rule ? make_global_pwc(scheme, dens, *t.rule, cfg.depth_cells, cfg.require_centred,
                                                        cfg.centred_tol)
                                      : make_pw_meanzero(op);
          if (const int k = used[g.label]++; k > 0) g.label += "_" + std::to_string(k + 1);
          v.push_back(std::move(g));
        }
        return v;
      });
      if (!obs.empty())
        done["glocal"] = stage("glocal", [&] {
          GlocalOptions o;
          o.n_max = cfg.n_max;
          o.n_compare = cfg.n_compare;
          o.tol = cfg.glocal_tol;
          o.trend_only = trend_only(cfg);
          CheckResult r = glocal_experiment(op, obs, o);
          for (const auto& g : obs)
            r.metric("centred_residual_" + g.label, g.centred_residual);
          return r;
        });
    }
  }

  for (const auto& name : known_checks())
    if (auto it = done.find(name); it != done.end()) rep.checks.push_back(std::move(it->second));
  return rep;
}

std::string summary_text(const VerificationReport& report, const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# glocal " << version << "\n";
  os << "# config_hash " << config_hash(cfg) << "\n";
  os << "# family " << cfg.map.tag;
  if (cfg.map.alpha) os << " alpha " << *cfg.map.alpha;
  os << "\n# depths: depth_cells " << cfg.depth_cells << ", ulam_cells " << cfg.ulam_cells << ", tau_cap "
     << cfg.tau_cap << ", operator_depth " << cfg.operator_depth << ", n_max " << cfg.n_max << ", ell_factor "
     << cfg.ell_factor << "\n";
  for (const auto& [k, v] : report.meta) os << "# " << k << " " << v << "\n";
  os << "\n";
  for (const auto& c : report.checks) {
    os << (c.passed() ? "PASS " : "FAIL ") << c.name << "\n";
    for (const auto& [k, ok] : c.criteria) os << "  " << (ok ? "ok   " : "FAIL ") << k << "\n";
    for (const auto& [k, v] : c.metrics) os << "  " << k << " = " << fmt(v) << "\n";
    for (const auto& n : c.notes) os << "  note: " << n << "\n";
  }
  os << "\n" << (report.passed() ? "all enabled checks passed" : "some checks failed") << "\n";
  return os.str();
}

std::vector<std::string> write_outputs(const VerificationReport& report, const ExperimentConfig& cfg,
                                       const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("out", "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> files;
  const auto put = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw ConfigError("out", "cannot write " + (fs::path(dir) / name).string());
    body(f);
    files.push_back(name);
  };
  put("report.json", [&](std::ostream& os) { os << to_json(report) << "\n"; });
  put("config.cfg", [&](std::ostream& os) { os << to_text(cfg); });
  for (const auto& c : report.checks)
    for (const auto& t : c.tables) put(c.name + "_" + t.name + ".csv", [&](std::ostream& os) { write_table_csv(os, t); });
  put("summary.txt", [&](std::ostream& os) { os << summary_text(report, cfg); });
  return files;
}

}  // namespace glocal
