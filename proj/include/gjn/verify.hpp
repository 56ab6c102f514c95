#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gjn/gjn_sim.hpp"
#include "gjn/limit_calculus.hpp"
#include "gjn/network.hpp"
#include "gjn/stats.hpp"

namespace gjn {

enum class Verdict { Pass, Fail, TrendPass, TrendFail, NotApplicable };
std::string_view to_string(Verdict verdict);

/// Metric per r along a strictly decreasing r grid.
struct ConvergenceSweep {
  std::string metric;
  std::vector<double> r_grid;
  std::vector<double> values;
  bool monotone_trend = false;
};

struct TestResult {
  std::string name;
  double statistic = 0.0;
  std::optional<double> p_value;
  std::optional<Interval> interval;
  double threshold = 0.0;
  Verdict verdict = Verdict::Fail;
  Index replications = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<ConvergenceSweep> sweeps;
  std::string detail;

  bool passed() const { return verdict != Verdict::Fail && verdict != Verdict::TrendFail; }
};

// ---------------------------------------------------------------------------
// Single-sample tests.

/// One-sample KS against Exponential(rate); pass iff p >= alpha. Needs at
/// least 100 points.
TestResult ks_exponential(const std::vector<double>& sample, double rate, double alpha = 0.01);

/// Pearson correlation with a Fisher-z interval per pair of coordinates;
/// pass iff every interval at `level` contains 0. Spearman's rho is reported
/// in the detail string.
TestResult independence_test(const std::vector<std::vector<double>>& samples,
                             const std::vector<std::pair<Index, Index>>& pairs, double level = 0.99);

// ---------------------------------------------------------------------------
// Oracles.

struct AbsorptionEstimate {
  Matrix w;
  Matrix standard_error;
  Index chains = 0;
};

/// Monte Carlo w: for each (i, j), run `chains` routing chains from i and
/// count those that reach j (after at least one step) before leaving the
/// network or entering a station above j.
AbsorptionEstimate absorption_oracle(const Matrix& routing, Index chains, std::uint64_t seed);

/// Largest relative gap between the two limit-variance formulas.
TestResult variance_identity_audit(const std::vector<NetworkSpec>& specs, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Pre-limit versus limit.

/// What the pre-limit samples come from.
enum class Source { Gjn, Srbm };

/// SRBM-level data for the pre-limit family. When built from a network the
/// discrete-event simulator can be used as the source as well.
struct LimitModel {
  Matrix reflection;
  Matrix gamma;
  ScaleRegime scales;
  std::optional<NetworkSpec> network;

  static LimitModel from_network(const NetworkSpec& spec);
  Index stations() const { return reflection.rows(); }
};

struct RunOptions {
  unsigned workers = 1;
  double step = 1e-3;
  SimOptions sim;
};

/// Unscaled initial state for the pre-limit system: xi_j / gamma_k(j)(r) in
/// the matching regimes and xi_j / gamma_1(r) in the lowest-rate ones.
Vector prelimit_initial(const ScaleRegime& scales, Regime regime, const Vector& xi, double r);

/// Samples of gamma_k(j)(r) Z_j(t / gamma_k(j)(r)^2) for every station j,
/// each on its own block clock. Result[p] is replications x J for probe p.
/// With the GJN source all stations of a replication come from one run.
std::vector<Matrix> prelimit_samples(const LimitModel& model, Regime regime, Source source, double r,
                                     const Vector& xi, const std::vector<double>& probes, Index replications,
                                     std::uint64_t master_seed, const RunOptions& options);

/// Matching samples of the limit process: column j is the coordinate that
/// describes station j.
std::vector<Matrix> limit_samples(const LimitDescriptor& desc, const Vector& xi, const std::vector<double>& probes,
                                  Index replications, std::uint64_t master_seed, const RunOptions& options);

/// Two-sample KS between pre-limit and limit samples of each station at each
/// probe. Per (station, probe) there is an absolute result at the smallest r
/// (alpha) and a trend result on the KS distance over the r grid.
std::vector<TestResult> functional_limit_check(const LimitModel& model, Regime regime, Source source,
                                               const std::vector<Index>& stations, const std::vector<double>& r_grid,
                                               const std::vector<double>& probes, const Vector& xi,
                                               Index replications, std::uint64_t master_seed,
                                               const RunOptions& options, double alpha = 0.01);

/// Correlation between the scaled stations of each pair at a fixed probe
/// time: a trend result on the largest |correlation| over the r grid and an
/// absolute independence_test at the smallest r.
std::vector<TestResult> asymptotic_independence_check(const LimitModel& model, Regime regime, Source source,
                                                      const std::vector<std::pair<Index, Index>>& pairs,
                                                      const std::vector<double>& r_grid, double probe,
                                                      const Vector& xi, Index replications,
                                                      std::uint64_t master_seed, const RunOptions& options);

/// On the clock of block k, sup over [0, horizon] of the scaled queue of the
/// slower blocks (< k) and of the scaled regulator of the faster blocks (> k).
/// Trend-pass iff the median of every available side decreases along the r
/// grid (values at or below 1e-12 count as settled at 0). NotApplicable when
/// there is only one block. Pre-limit source is the SRBM family.
TestResult scale_separation_check(const LimitModel& model, const std::vector<Index>& blocks,
                                  const std::vector<double>& r_grid, const Vector& xi, double horizon,
                                  Index replications, std::uint64_t master_seed, const RunOptions& options);

/// Strictly decreasing r grid inside (0, 1).
void require_r_grid(const std::vector<double>& r_grid);

}  // namespace gjn
