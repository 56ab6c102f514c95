#pragma once

#include <string>

#include "gjn/network.hpp"
#include "json.hpp"

namespace gjn {

/// JSON schema (station indices are 1-based and inclusive):
///
///   {
///     "J": 2,
///     "P": [[0, 1], [0, 0]],
///     "alpha": [1, 0],
///     "arrival_dists": ["exponential", {"family": "erlang", "params": {"k": 2}}],
///     "service_dists": [...],
///     "blocks": [{"stations": [1, 1], "exponent": 1, "b": [1]}, ...]
///   }
///
/// "blocks" defaults to singleton blocks with exponents 1..J and b = 1.
/// Errors name the offending key path, e.g. "network.blocks[1].exponent".
NetworkSpec network_from_json(const nlohmann::json& node, const std::string& path = "network");
nlohmann::json to_json(const NetworkSpec& spec);

DistributionSpec distribution_from_json(const nlohmann::json& node, const std::string& path);
nlohmann::json to_json(const DistributionSpec& dist);

}  // namespace gjn
