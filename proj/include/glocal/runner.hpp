#pragma once

// One experiment end to end: map, inducing scheme, density, operator, checks,
// then report.json, one CSV per table and summary.txt.

#include <string>
#include <vector>

#include "glocal/config.hpp"
#include "glocal/report.hpp"

namespace glocal {

inline constexpr const char* version = "0.3.0";

struct RunOptions {
  int threads = 1;
  std::vector<std::string> checks;  // overrides the config's list when non-empty
};

/// Stage failures are rethrown as StageError tagged map, scheme, density,
/// operator, observables or the check name. ConfigError passes through.
VerificationReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Human-readable digest with a provenance header.
std::string summary_text(const VerificationReport& report, const ExperimentConfig& cfg);

/// Creates dir if needed. Returns the files written, relative to dir.
std::vector<std::string> write_outputs(const VerificationReport& report, const ExperimentConfig& cfg,
                                       const std::string& dir);

}  // namespace glocal
