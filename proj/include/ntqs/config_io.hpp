#pragma once

#include "ntqs/neural_planner.hpp"

#include <json.hpp>

namespace ntqs {

using nlohmann::json;

/// Configurations are stored as plain value arrays; the kind comes from context.
json config_to_json(const Configuration& c);
Configuration config_from_json(const json& j, ConfigKind kind);

// Field names match the struct members. Missing fields keep their defaults;
// unknown fields are rejected with ValidationError.
void to_json(json& j, const ExpertConfig& c);
void from_json(const json& j, ExpertConfig& c);
void to_json(json& j, const SamplerConfig& c);
void from_json(const json& j, SamplerConfig& c);
void to_json(json& j, const DatasetConfig& c);
void from_json(const json& j, DatasetConfig& c);
void to_json(json& j, const ModelShape& c);
void from_json(const json& j, ModelShape& c);
void to_json(json& j, const TrainConfig& c);
void from_json(const json& j, TrainConfig& c);
void to_json(json& j, const PlannerConfig& c);
void from_json(const json& j, PlannerConfig& c);
void to_json(json& j, const GammaEstimate& g);

/// Throws ValidationError naming `where` if `j` has keys outside `allowed`.
void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* where);

} // namespace ntqs
