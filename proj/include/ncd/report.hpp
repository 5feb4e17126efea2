#pragma once

// JSON and CSV forms of configurations and reports. Report JSON has the shape
// {"quantity": ..., "parameters": {...}, "value": ..., "series": [...]}.

#include <nlohmann/json.hpp>
#include <string>

#include "ncd/experiments.hpp"

namespace ncd {

nlohmann::json to_json(const SimConfig& config);

/// 16 hex digits of FNV-1a over the canonical JSON dump of the config.
std::string config_hash(const SimConfig& config);

nlohmann::json to_json(const MomentReport& r);
nlohmann::json to_json(const OuReport& r);
nlohmann::json to_json(const ModulusScalingReport& r);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const EnergyCheckReport& r);
nlohmann::json to_json(const StrongOrderReport& r, const SimConfig& config);

std::string to_csv(const MomentReport& r);
std::string to_csv(const OuReport& r);
std::string to_csv(const ModulusScalingReport& r);
std::string to_csv(const ConvergenceReport& r);
std::string to_csv(const EnergyCheckReport& r);
std::string to_csv(const StrongOrderReport& r);

}  // namespace ncd
