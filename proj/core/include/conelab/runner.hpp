#pragma once

#include <iosfwd>

#include "conelab/config.hpp"

namespace conelab {

/// Executes the configured experiment, writing all artifacts under
/// cfg.output_dir. Returns the process exit code: 0 success, 1 check
/// failure, 2 usage error, 3 numerical divergence.
int run_experiment(const RunConfig& cfg, std::ostream& log);

}  // namespace conelab
