#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gjn/limit_calculus.hpp"
#include "gjn/network.hpp"
#include "json.hpp"

namespace gjn::app {

/// Stationary run lengths in scaled time units of the slowest block; the
/// simulator gets them divided by gamma_K(r)^2.
struct StationaryConfig {
  double burn_in = 100.0;
  double batch_len = 50.0;
  Index batches = 200;
};

/// A standalone SRBM for `simulate-srbm`.
struct SrbmConfig {
  Vector initial;
  Vector drift;
  Matrix covariance;
  Matrix reflection;
};

struct ExperimentConfig {
  NetworkSpec network;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::string out_dir = "out";
  std::vector<double> r_grid{0.3, 0.1, 0.03};
  Regime regime = Regime::Matching;
  Vector xi;
  /// Scaled horizon and Euler step for path output and SRBM runs.
  double horizon = 1.0;
  double step = 1e-3;
  /// Points of the scaled observation grid for simulate-gjn.
  Index grid_points = 100;
  std::vector<double> probe_times{1.0};
  Index replications = 200;
  std::uint64_t event_cap = 500'000'000;
  StationaryConfig stationary;
  Index chains = 100'000;
  std::vector<std::string> checks;
  std::optional<SrbmConfig> srbm;
};

/// Overrides from the command line or environment; they win over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
};

/// Names accepted in "checks".
const std::vector<std::string>& known_checks();

/// Reads and validates a config. Relative "network_file" paths resolve
/// against `base_dir`. Every error names its key path.
ExperimentConfig config_from_json(const nlohmann::json& node, const std::string& base_dir,
                                  const Overrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});

/// Full config with every default resolved; feeding it back to
/// config_from_json reproduces the run.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace gjn::app
