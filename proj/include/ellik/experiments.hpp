// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_EXPERIMENTS_HPP
#define ELLIK_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "ellik/config.hpp"

namespace ellik {

/// Runs one experiment and writes its artifacts (CSV, optional VTK) under the
/// configured output directory. When ELLIK_OUTPUT_ROOT is set in the
/// environment, relative output directories are resolved under it. Returns the
/// paths written; throws on any failure.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

/// Resolved output directory (env root applied).
std::string resolve_output_dir(const ExperimentConfig& config);

}  // namespace ellik

#endif  // ELLIK_EXPERIMENTS_HPP
