#pragma once

// Experiment configs: a key = value text file, one key per line, '#' starts a
// comment. Lists are comma separated. The schema is in README.md.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "glocal/maps.hpp"

namespace glocal {

struct ExperimentConfig {
  FamilySpec map;

  // depths
  long depth_cells = 10000;      // cells of the tails enumerated for eqY and observables
  std::size_t ulam_cells = 4096;
  long tau_cap = 512;
  long operator_depth = 100000;
  int operator_subcells = 2;
  long n_max = 2000;
  long n_compare = 200;
  double ell_factor = 50;

  std::vector<long> j_values{250, 500, 1000, 2000};
  double eps = 0.2;
  std::vector<double> eps_sweep{0.1, 0.2, 0.4};

  // alternating, zero, meanzero, constant:<v>, block:<L>, custom:<g1>;<g2>;...
  std::vector<std::string> observables{"alternating", "meanzero"};
  bool require_centred = false;

  // tolerances, all in (0,1)
  double oscillation_tol = 0.03;
  double additivity_tol = 0.01;
  double sup_tol = 0.05;
  double spread_tol = 0.05;
  double cauchy_tol = 0.03;
  double glocal_tol = 0.02;
  double centred_tol = 0.1;
  double max_leak = 1e-3;
  double fprime_tol = 0.02;
  double cmt_tol = 0.1;
  double measure_tol = 1e-4;
  double eps_stability = 2.0;  // ratio bound, > 1

  // "auto": trend only when alpha = 1
  std::string trend = "auto";
  std::vector<std::string> checks{"eqY", "eqJ", "eqK", "glocal"};
  std::string out = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Names accepted in `checks`.
const std::vector<std::string>& known_checks();

/// Parse and validate. Errors are ConfigError naming the key.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text: every key, fixed order, shortest round-trip numbers.
std::string to_text(const ExperimentConfig& cfg);

/// Range checks on an assembled config, including the map parameters.
void validate(const ExperimentConfig& cfg);

bool trend_only(const ExperimentConfig& cfg);

/// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace glocal
