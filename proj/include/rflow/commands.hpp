#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rflow/config.hpp"

namespace rflow {

struct CommandOutcome {
    int exit_code = 0;
    std::vector<std::string> files_written;
};

/// One CSV per (seed, start); summary per path on the log stream.
CommandOutcome cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);

/// Derivative by the configured method(s) per (seed, start): CSV per method
/// plus one JSON metadata file. Non-convergence is reported in the JSON and
/// through a nonzero exit code.
CommandOutcome cmd_derivative(const ExperimentConfig& cfg, std::ostream& log);

/// Shared-noise scan of f over the configured x1 range, one CSV + JSON per seed.
CommandOutcome cmd_scan(const ExperimentConfig& cfg, std::ostream& log);

} // namespace rflow
