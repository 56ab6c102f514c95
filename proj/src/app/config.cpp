#include "gjn/app/config.hpp"

#include <algorithm>
#include <filesystem>

#include "gjn/json_util.hpp"
#include "gjn/network_json.hpp"

namespace gjn::app {

using json_util::fail;
using json_util::json;

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"variance_identity", "absorption",   "ks_exponential",
                                              "functional_limit",  "independence", "scale_separation"};
  return names;
}

namespace {

const std::vector<std::string> kKeys{
    "network", "network_file", "master_seed", "workers", "out_dir", "r_grid", "regime", "xi", "horizon", "step",
    "grid_points", "probe_times", "replications", "event_cap", "stationary", "chains", "checks", "srbm"};

double positive(const json& node, const std::string& path) {
  const double v = json_util::number(node, path);
  if (!(v > 0.0)) fail(path, "must be positive");
  return v;
}

Index count(const json& node, const std::string& path, std::int64_t min) {
  const std::int64_t v = json_util::integer(node, path);
  if (v < min) fail(path, "must be >= " + std::to_string(min));
  return static_cast<Index>(v);
}

}  // namespace

ExperimentConfig config_from_json(const json& node, const std::string& base_dir, const Overrides& overrides) {
  if (!node.is_object()) fail("config", "expected an object");
  for (const auto& [key, _] : node.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) fail(key, "unknown key");
  }
  ExperimentConfig c;

  if (node.contains("network") == node.contains("network_file")) {
    fail("network", "give exactly one of \"network\" and \"network_file\"");
  }
  if (node.contains("network")) {
    c.network = network_from_json(node.at("network"), "network");
  } else {
    std::filesystem::path file = json_util::string(node.at("network_file"), "network_file");
    if (file.is_relative()) file = std::filesystem::path(base_dir) / file;
    c.network = network_from_json(json_util::parse_file(file.string()), "network_file");
  }
  const ValidationReport report = validate(c.network);
  if (!report.ok()) fail("network", report.summary());
  const Index J = c.network.stations();

  if (overrides.seed) {
    c.master_seed = *overrides.seed;
  } else {
    const json& s = json_util::require(node, "master_seed", "config");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      fail("master_seed", "expected a nonnegative integer");
    }
    c.master_seed = s.get<std::uint64_t>();
  }
  if (node.contains("workers")) c.workers = static_cast<unsigned>(count(node.at("workers"), "workers", 1));
  if (overrides.workers) c.workers = *overrides.workers;
  if (c.workers == 0) fail("workers", "must be >= 1");
  if (node.contains("out_dir")) c.out_dir = json_util::string(node.at("out_dir"), "out_dir");
  if (overrides.out_dir) c.out_dir = *overrides.out_dir;

  if (node.contains("r_grid")) {
    c.r_grid = json_util::doubles(node.at("r_grid"), "r_grid");
    if (c.r_grid.empty()) fail("r_grid", "must not be empty");
    for (std::size_t i = 0; i < c.r_grid.size(); ++i) {
      if (!(c.r_grid[i] > 0.0 && c.r_grid[i] < 1.0)) fail("r_grid[" + std::to_string(i) + "]", "must lie in (0,1)");
      if (i > 0 && !(c.r_grid[i] < c.r_grid[i - 1])) fail("r_grid", "must be strictly decreasing");
    }
  }
  if (node.contains("regime")) {
    try {
      c.regime = regime_from_string(json_util::string(node.at("regime"), "regime"));
    } catch (const Error& e) {
      fail("regime", e.what());
    }
  }
  c.xi = Vector::Ones(J);
  if (node.contains("xi")) {
    c.xi = json_util::vector(node.at("xi"), "xi");
    if (c.xi.size() != J) fail("xi", "must have J entries");
    if ((c.xi.array() < 0.0).any()) fail("xi", "entries must be nonnegative");
  }
  if (node.contains("horizon")) c.horizon = positive(node.at("horizon"), "horizon");
  if (node.contains("step")) c.step = positive(node.at("step"), "step");
  if (node.contains("grid_points")) c.grid_points = count(node.at("grid_points"), "grid_points", 1);
  if (node.contains("probe_times")) {
    c.probe_times = json_util::doubles(node.at("probe_times"), "probe_times");
    if (c.probe_times.empty()) fail("probe_times", "must not be empty");
    for (std::size_t i = 0; i < c.probe_times.size(); ++i) {
      if (!(c.probe_times[i] > 0.0)) fail("probe_times[" + std::to_string(i) + "]", "must be positive");
    }
  }
  if (node.contains("replications")) c.replications = count(node.at("replications"), "replications", 1);
  if (node.contains("event_cap")) c.event_cap = static_cast<std::uint64_t>(positive(node.at("event_cap"), "event_cap"));
  if (node.contains("stationary")) {
    const json& s = node.at("stationary");
    if (!s.is_object()) fail("stationary", "expected an object");
    for (const auto& [key, _] : s.items()) {
      if (key != "burn_in" && key != "batch_len" && key != "batches") fail("stationary." + key, "unknown key");
    }
    if (s.contains("burn_in")) {
      c.stationary.burn_in = json_util::number(s.at("burn_in"), "stationary.burn_in");
      if (c.stationary.burn_in < 0.0) fail("stationary.burn_in", "must be nonnegative");
    }
    if (s.contains("batch_len")) c.stationary.batch_len = positive(s.at("batch_len"), "stationary.batch_len");
    if (s.contains("batches")) c.stationary.batches = count(s.at("batches"), "stationary.batches", 1);
  }
  if (node.contains("chains")) c.chains = count(node.at("chains"), "chains", 1);
  if (node.contains("checks")) {
    const json& list = node.at("checks");
    if (!list.is_array()) fail("checks", "expected an array of names");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "checks[" + std::to_string(i) + "]";
      const std::string name = json_util::string(list[i], path);
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), name) == known.end()) fail(path, "unknown check '" + name + "'");
      c.checks.push_back(name);
    }
  } else {
    c.checks = known_checks();
  }
  if (node.contains("srbm")) {
    const json& s = node.at("srbm");
    SrbmConfig srbm;
    srbm.drift = json_util::vector(json_util::require(s, "drift", "srbm"), "srbm.drift");
    const Index d = srbm.drift.size();
    srbm.covariance = json_util::matrix(json_util::require(s, "covariance", "srbm"), "srbm.covariance");
    srbm.reflection = s.contains("reflection") ? json_util::matrix(s.at("reflection"), "srbm.reflection")
                                               : Matrix(Matrix::Identity(d, d));
    srbm.initial = s.contains("initial") ? json_util::vector(s.at("initial"), "srbm.initial") : Vector(Vector::Zero(d));
    if (srbm.covariance.rows() != d || srbm.covariance.cols() != d) fail("srbm.covariance", "must be d x d");
    if (srbm.reflection.rows() != d || srbm.reflection.cols() != d) fail("srbm.reflection", "must be d x d");
    if (srbm.initial.size() != d) fail("srbm.initial", "must have d entries");
    c.srbm = srbm;
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  const json node = json_util::parse_file(path);
  return config_from_json(node, std::filesystem::path(path).parent_path().string(), overrides);
}

json to_json(const ExperimentConfig& c) {
  json out;
  out["network"] = gjn::to_json(c.network);
  out["master_seed"] = c.master_seed;
  out["workers"] = c.workers;
  out["out_dir"] = c.out_dir;
  out["r_grid"] = c.r_grid;
  out["regime"] = std::string(to_string(c.regime));
  out["xi"] = json_util::to_json(c.xi);
  out["horizon"] = c.horizon;
  out["step"] = c.step;
  out["grid_points"] = c.grid_points;
  out["probe_times"] = c.probe_times;
  out["replications"] = c.replications;
  out["event_cap"] = c.event_cap;
  out["stationary"] = {{"burn_in", c.stationary.burn_in},
                       {"batch_len", c.stationary.batch_len},
                       {"batches", c.stationary.batches}};
  out["chains"] = c.chains;
  out["checks"] = c.checks;
  if (c.srbm) {
    out["srbm"] = {{"initial", json_util::to_json(c.srbm->initial)},
                   {"drift", json_util::to_json(c.srbm->drift)},
                   {"covariance", json_util::to_json(c.srbm->covariance)},
                   {"reflection", json_util::to_json(c.srbm->reflection)}};
  }
  return out;
}

}  // namespace gjn::app
