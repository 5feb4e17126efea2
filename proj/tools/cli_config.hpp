#pragma once

// TOML configuration for the ncd tool. Every table and key is checked; an
// unknown key is a validation error naming its dotted path.
//
//   [sim]               epsilon, n_modes, dt, T, scheme, save_stride, seed,
//                       u0 ("sine" | "zero" | coefficient array)
//   [sim.nonlinearity]  kind ("cubic" | "truncated" | "linear"), radius, forcing
//   [sim.noise]         kind ("additive" | "linear-multiplicative" |
//                       "sine-multiplicative"), gamma, profile
//   [moments] [modulus] [converge] [ou-check] [energy-check] [strong-order]
//
// Defaults are listed in README.md and echoed into every report.

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ncd/experiments.hpp"
#include "tomlplusplus/toml.hpp"

namespace ncd::cli {

struct MomentsParams {
  std::vector<double> epsilons{0.0, 0.01, 0.1, 0.5};
  std::vector<double> ps{2.0, 4.0};
  std::size_t samples = 64;
  std::vector<double> max_uniformity;  // per p; default 2 for p <= 2, else 3
};

struct ModulusParams {
  std::vector<double> deltas{0.02, 0.04, 0.08, 0.16};
  SobolevSpace space = SobolevSpace::Hneg1;
  std::size_t samples = 32;
  ShiftBoundary boundary = ShiftBoundary::ZeroExtension;
  double min_slope = 0.8;
  double max_slope = 1.2;
};

struct ConvergeParams {
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  std::size_t samples = 64;
  std::optional<double> delta;
  double exceedance_threshold = 0.05;
  SobolevSpace space = SobolevSpace::H1;
};

struct OuParams {
  int k = 1;
  double c0 = 1.0;
  std::size_t samples = 10000;
};

struct EnergyParams {
  int levels = 4;
  std::size_t samples = 100;
  double min_deterministic_ratio = 3.5;
  double max_deterministic_ratio = 4.5;
  double min_stochastic_ratio = 1.3;
};

struct StrongParams {
  int levels = 4;
  std::size_t samples = 32;
  std::optional<double> expected_order;
  double tolerance = 0.2;
};

struct RunConfig {
  SimConfig sim;
  MomentsParams moments;
  ModulusParams modulus;
  ConvergeParams converge;
  OuParams ou;
  EnergyParams energy;
  StrongParams strong;
};

/// Parses TOML text; throws ValidationError on syntax errors.
toml::table parse_toml(const std::string& text, const std::string& source);

/// Sets a dotted key ("sim.noise.gamma") to a value given as TOML text
/// ("0.5", "[1, 2]", "\"tamed\""); bare words are taken as strings.
void apply_override(toml::table& table, const std::string& dotted_key, const std::string& value);

/// Strict conversion of the whole table.
RunConfig read_config(const toml::table& table);

nlohmann::json to_json(const RunConfig& c, const std::string& section);

}  // namespace ncd::cli
