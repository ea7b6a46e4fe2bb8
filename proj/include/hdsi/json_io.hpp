#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "hdsi/effects.hpp"
#include "hdsi/lasso.hpp"
#include "hdsi/multitest.hpp"
#include "hdsi/simulation.hpp"

namespace hdsi {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

nlohmann::json to_json(const LassoFit& fit, const std::vector<std::string>& names);
nlohmann::json to_json(const SupScoreResult& res);
nlohmann::json to_json(const EffectEstimates& est, bool include_scores);
nlohmann::json to_json(const AdjustedPValues& adj, const EffectEstimates& est);
nlohmann::json to_json(const JointConfidenceRegion& region, const EffectEstimates& est);
nlohmann::json to_json(const SimulationReport& report);

EffectEstimates effect_estimates_from_json(const nlohmann::json& j);

// Wraps a payload with {"schema": 1, "manifest": ..., <key>: payload}.
nlohmann::json wrap_output(const std::string& key, nlohmann::json payload,
                           nlohmann::json manifest);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace hdsi
