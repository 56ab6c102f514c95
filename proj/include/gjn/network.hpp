#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gjn/distribution.hpp"
#include "gjn/types.hpp"

namespace gjn {

/// Stations first..last (inclusive, 0-based) whose idle rates vanish like
/// r^exponent, scaled per station by the positive drift vector.
struct Block {
  Index first = 0;
  Index last = 0;
  double exponent = 1.0;
  Vector drift;

  Index size() const { return last - first + 1; }
};

/// Power-family scale functions gamma_k(r) = r^{beta_k} over an ordered,
/// contiguous partition of the stations.
struct ScaleRegime {
  std::vector<Block> blocks;

  /// One singleton block per station with exponents 1..J and unit drifts.
  static ScaleRegime fully_multiscale(Index stations);
  /// A single block: conventional heavy traffic.
  static ScaleRegime single_block(Index stations, double exponent = 1.0);
  static ScaleRegime singletons(const std::vector<double>& exponents);

  Index block_count() const { return static_cast<Index>(blocks.size()); }
  Index stations() const { return blocks.empty() ? 0 : blocks.back().last + 1; }
  Index block_of(Index station) const;
  bool all_singletons() const;

  double gamma(Index block, double r) const;
  /// gamma of the block containing each station.
  Vector station_gamma(double r) const;
  /// mu^(r) - lambda, i.e. gamma_k(r) b^(k) stacked over blocks.
  Vector idle_rates(double r) const;
};

struct NetworkSpec {
  Matrix routing;
  Vector alpha;
  std::vector<DistributionSpec> arrival;
  std::vector<DistributionSpec> service;
  ScaleRegime regime;

  Index stations() const { return routing.rows(); }
  Vector arrival_scv() const;
  Vector service_scv() const;
};

/// Solves lambda = alpha + P' lambda by an LU solve of (I - P') lambda = alpha.
Vector solve_traffic(const NetworkSpec& spec);

/// mu^(r) = lambda + gamma_k(r) b^(k) for stations in block k.
Vector service_rates(const NetworkSpec& spec, const Vector& lambda, double r);
Vector service_rates(const NetworkSpec& spec, double r);

/// Largest |eigenvalue| of the routing matrix.
double spectral_radius(const Matrix& routing);

struct ValidationIssue {
  std::string message;
  std::optional<Index> station;  // 1-based, for reporting
  std::optional<Index> block;    // 1-based
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

ValidationReport validate(const NetworkSpec& spec);

/// Throws Error(Config) listing every issue when the spec is invalid.
void require_valid(const NetworkSpec& spec);

}  // namespace gjn
