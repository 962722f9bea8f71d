#pragma once

#include <string>

#include <json.hpp>

#include "relaybc/allocator.hpp"
#include "relaybc/experiments.hpp"

namespace relaybc {

// Config schema mirrors NetworkConfig field names. Coordinates are [x, y]
// arrays; sigma2 accepts {"dbm_per_hz": -100}, {"w_per_hz": 1e-13} or a
// plain W/Hz number. Missing fields keep the reference-scenario defaults.
NetworkConfig config_from_json(const nlohmann::json& j);
NetworkConfig load_config(const std::string& path);
nlohmann::json config_to_json(const NetworkConfig& cfg);

// Applies a partial config (same schema) on top of an existing one.
void apply_overrides(NetworkConfig& cfg, const nlohmann::json& overrides);

nlohmann::json breakdown_to_json(const RateBreakdown& bd);
nlohmann::json report_to_json(const SolverReport& rep,
                              const NetworkConfig& cfg);

}  // namespace relaybc
