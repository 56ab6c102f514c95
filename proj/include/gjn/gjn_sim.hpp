#pragma once

#include <cstdint>
#include <vector>

#include "gjn/network.hpp"
#include "gjn/skorokhod.hpp"

namespace gjn {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

struct SimOptions {
  std::uint64_t event_cap = 500'000'000;
  /// Check after every event that each server is busy iff its queue is
  /// nonempty. Costs O(J) per event.
  bool audit = false;
};

/// Everything recorded at the observation times. Row n of each matrix is the
/// state at sample_times(n); Z is right-continuous, so events at exactly that
/// time are included.
struct SimOutput {
  double r = 0.0;
  Vector service_rates;
  CountVector initial;
  Vector sample_times;
  CountMatrix queue_lengths;
  Matrix busy_times;
  /// Y_j(t) = mu_j (t - B_j(t)).
  Matrix idle_regulator;
  /// Integral of Z_j over [0, t].
  Matrix queue_integrals;
  /// Counters for the flow identity Z = Z(0) + A + routed_in - S.
  CountMatrix external_arrivals;
  CountMatrix routed_in;
  CountMatrix departures;
  std::uint64_t event_count = 0;
  /// Events after which some server was busy with an empty queue or idle with
  /// a nonempty one. Only counted when SimOptions::audit is set.
  std::uint64_t work_conservation_violations = 0;
};

/// Discrete-event simulation of the network at heavy-traffic parameter r with
/// FCFS single-server stations. Observation times must be nondecreasing and
/// lie in [0, horizon]. Interarrival, service and routing draws for station j
/// come from independent streams derived from `seed`.
SimOutput simulate(const NetworkSpec& spec, double r, const CountVector& z0, double horizon,
                   const Vector& observation_times, std::uint64_t seed, const SimOptions& options = {});

/// Row indices where the flow identity fails (empty when it holds exactly).
std::vector<Index> flow_conservation_failures(const SimOutput& out);

/// Matching-rate start: z0_j = ceil(xi_j / gamma_j(r)).
CountVector matching_initial(const ScaleRegime& regime, const Vector& xi, double r);

/// Real times t / gamma^2 for each scaled time and gamma, merged and sorted.
Vector observation_grid(const std::vector<double>& scaled_times, const std::vector<double>& gammas);

/// gamma_k(r) Z(t / gamma_k(r)^2) at the given scaled times, all stations.
/// Each real time must match a recorded sample time to relative 1e-9.
PathGrid scaled_path(const SimOutput& out, Index block, const ScaleRegime& regime, const Vector& scaled_times);
/// Same with an explicit scale factor.
PathGrid scaled_path(const SimOutput& out, double gamma, const Vector& scaled_times);
/// gamma Y(t / gamma^2), same grid rules.
PathGrid scaled_regulator(const SimOutput& out, double gamma, const Vector& scaled_times);

struct StationarySample {
  /// gamma_j(r) Z_j at the end of each batch (batches x J).
  Matrix boundary;
  /// Time average of gamma_j(r) Z_j within each batch (batches x J).
  Matrix batch_means;
  std::uint64_t event_count = 0;
};

/// Runs from an empty network, drops [0, burn_in] and cuts the rest into
/// batches of length batch_len. Times are real (unscaled) time units.
StationarySample stationary_sample(const NetworkSpec& spec, double r, std::uint64_t seed, double burn_in,
                                   Index batches, double batch_len, const SimOptions& options = {});

}  // namespace gjn
