#pragma once

// Monte Carlo harnesses. Sample i always draws its Brownian path from
// derive_seed(config.seed, i, 0); every simulation belonging to that sample
// (all epsilons, the epsilon = 0 reference, all refinement levels) consumes
// that same path. Per-sample results are stored by index and reduced in index
// order, so reports do not depend on the worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncd/analysis.hpp"

namespace ncd {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Brownian path of Monte Carlo sample i.
BrownianPath sample_brownian_path(const SimConfig& config, std::size_t sample_index);

// ---------------------------------------------------------------------------
// Moments

/// One estimated moment across the epsilon grid.
///   sup_l2:       E sup_t |u|^p
///   sup_energy:   E sup_t (|u|^2 + eps |u_x|^2)^(p/2)
///   dissipation:  E (int_0^T |u_x|^2 + |u|_L4^4 dt)^(p/2)
///   h2_integral:  E int_0^T |u_xx|^2 dt            (p = 2 only)
struct MomentSeries {
  std::string quantity;
  double p = 2.0;
  std::vector<Estimate> by_epsilon;
  double uniformity_factor = 1.0;  // max / min of the means across epsilon
  bool upward_trend = false;       // every step toward smaller eps rises by > 2 SE
};

struct MomentReport {
  std::vector<double> epsilons;
  std::vector<double> ps;
  std::size_t samples = 0;
  std::vector<std::size_t> excluded;  // per epsilon
  std::vector<MomentSeries> series;
  bool jensen_ok = true;
  std::uint64_t master_seed = 0;
  std::string config_hash;

  const MomentSeries& find(const std::string& quantity, double p) const;
};

MomentReport mc_moments(const SimConfig& config, const std::vector<double>& epsilons,
                        const std::vector<double>& ps, std::size_t samples,
                        std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck oracle

/// Linear mode, f = 0, additive noise gamma e_k, u0 = c0 e_k on n = k modes.
SimConfig ou_config(double epsilon, int k, double gamma, double horizon, double dt,
                    double c0 = 1.0);

struct OuReport {
  double epsilon = 0.0;
  int k = 1;
  double gamma = 0.0;
  double c0 = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
  std::size_t samples = 0;
  double mu = 0.0;     // lambda_k / (1 + eps lambda_k)
  double sigma = 0.0;  // gamma / (1 + eps lambda_k)
  double exact_mean = 0.0;
  double exact_variance = 0.0;
  Estimate mean;
  Estimate variance;
  double mean_deviation = 0.0;      // |mc - exact|
  double variance_deviation = 0.0;
  double variance_relative_deviation = 0.0;  // |mc - exact| / exact
  double mean_tolerance = 0.0;      // 3 SE + 2% of |exact|
  double variance_tolerance = 0.0;
  double tolerance_ratio = 0.0;     // max of deviation / tolerance; <= 1 passes
  bool passed = false;
  std::uint64_t master_seed = 0;
  std::string config_hash;
};

/// Mode k of the configured system is the scalar OU process
/// dc = -mu c dt + sigma dB; compares the Monte Carlo mean and variance at T
/// with c(0) e^{-mu T} and sigma^2 (1 - e^{-2 mu T}) / (2 mu).
OuReport ou_oracle_check(const SimConfig& config, int k, std::size_t samples,
                         std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Time-shift modulus

struct ModulusScalingReport {
  std::vector<double> deltas;
  SobolevSpace space = SobolevSpace::Hneg1;
  ShiftBoundary boundary = ShiftBoundary::ZeroExtension;
  std::vector<Estimate> mean_modulus;  // E sup_theta int |u(t+theta) - u(t)|^2
  std::vector<double> sup_of_mean;     // sup_theta E int |u(t+theta) - u(t)|^2
  double slope = 0.0;                  // of log E sup against log delta
  double slope_sup_of_mean = 0.0;
  bool monotone = true;
  std::size_t samples = 0;
  std::size_t excluded = 0;
  std::uint64_t master_seed = 0;
  std::string config_hash;
};

ModulusScalingReport modulus_scaling(const SimConfig& config, const std::vector<double>& deltas,
                                     SobolevSpace s, std::size_t samples,
                                     std::size_t workers = 1,
                                     ShiftBoundary boundary = ShiftBoundary::ZeroExtension);

// ---------------------------------------------------------------------------
// Inviscid limit

/// |u^eps - z|_{L2(0,T; s)} with z the epsilon = 0 solution on the same path.
double inviscid_gap(const SimConfig& config, double epsilon, const BrownianPath& path,
                    SobolevSpace s = SobolevSpace::H1);
double inviscid_gap(const SimConfig& config, double epsilon, std::uint64_t seed,
                    SobolevSpace s = SobolevSpace::H1);

struct ConvergenceRow {
  double epsilon = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double exceedance = 0.0;  // fraction of samples with gap > delta
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<double> pairwise_decrease;  // per consecutive pair, fraction with gap_{i+1} < gap_i
  double delta = 0.0;
  std::string delta_source;  // "configured" or "half-median-at-largest-epsilon"
  double exceedance_threshold = 0.05;
  SobolevSpace space = SobolevSpace::H1;
  bool medians_decreasing = true;
  bool final_exceedance_ok = true;
  bool passed = true;  // medians_decreasing && final_exceedance_ok
  std::size_t samples = 0;
  std::size_t excluded = 0;
  std::uint64_t path_digest = 0;  // combined checksum of the shared paths
  std::vector<std::vector<double>> gaps;  // [sample][epsilon], excluded samples omitted
  std::uint64_t master_seed = 0;
  std::string config_hash;
};

ConvergenceReport convergence_study(const SimConfig& config, const std::vector<double>& epsilons,
                                    std::size_t samples, std::optional<double> delta = std::nullopt,
                                    double exceedance_threshold = 0.05,
                                    SobolevSpace s = SobolevSpace::H1, std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Energy balance

struct EnergyCheckReport {
  std::vector<double> dts;
  std::vector<double> deterministic_max_residual;  // noise switched off
  std::vector<double> deterministic_ratios;        // coarse / fine
  std::vector<double> stochastic_rms_cumulative;   // over samples, bridge-refined paths
  std::vector<double> stochastic_ratios;
  std::size_t samples = 0;
  std::size_t excluded = 0;
  std::uint64_t master_seed = 0;
  std::string config_hash;
};

/// Runs levels dt, dt/2, ... with every step saved.
EnergyCheckReport energy_check(const SimConfig& config, int levels, std::size_t samples,
                               std::size_t workers = 1);

/// Copy of the model with gamma = 0.
NoiseModel without_noise(const NoiseModel& model);

}  // namespace ncd
