#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "gjn/app/config.hpp"
#include "gjn/error.hpp"

namespace gjn::app {

struct CommandOptions {
  /// Also write tidy long-format CSVs for external plotting.
  bool emit_plot_data = false;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes report.json (plus CSVs) into the output
/// directory. Wall-clock time goes to timing.json so that report.json only
/// depends on the config. Returns 0, or 1 when a non-trend test failed;
/// library errors propagate as gjn::Error.
int run_command(const std::string& name, const ExperimentConfig& config, const CommandOptions& options,
                std::ostream& log);

/// 2 for bad input, 3 for failures while running.
int exit_code(ErrorKind kind);

}  // namespace gjn::app
