#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

#include "ncd/dynamics.hpp"
#include "ncd/stochastic.hpp"

namespace ncd {

/// TamedEM:       c+ = c + dt a / (1 + dt |a|_2) + b dB
/// SemiImplicitEM: the stiff term lambda_k / (1 + eps lambda_k) is implicit,
///                 everything else explicit.
enum class Scheme { TamedEM, SemiImplicitEM };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme s);

/// Coefficients of sin(pi x) = e_1 / sqrt(2).
SpectralField default_initial_data(std::size_t n_modes);

struct SimConfig {
  double epsilon = 0.0;
  std::size_t n_modes = 32;
  double dt = 1e-3;
  double horizon = 1.0;
  Scheme scheme = Scheme::SemiImplicitEM;
  NonlinearityMode mode = Cubic{};
  NoiseModel noise = Additive{SpectralField::unit(32, 1), 0.3};
  SpectralField u0 = default_initial_data(32);
  std::size_t save_stride = 1;
  std::uint64_t seed = 0;

  /// Throws ValidationError naming the offending field.
  void validate() const;

  std::size_t steps() const { return step_count(horizon, dt); }
};

/// Defaults with every field sized for n modes.
SimConfig default_config(std::size_t n_modes = 32);

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> fields;
  std::shared_ptr<const SimConfig> config;

  std::size_t size() const noexcept { return times.size(); }
  double save_interval() const;
};

/// One step; throws BlowUpError if the new state is not finite.
GalerkinState step(const GalerkinState& state, double dB, double dt, Scheme scheme,
                   const NonlinearityMode& mode, const NoiseModel& noise);

Trajectory simulate(const SimConfig& config, const BrownianPath& path);

/// Field at T only; skips the trajectory storage.
SpectralField simulate_endpoint(const SimConfig& config, const BrownianPath& path);

struct StrongOrderReport {
  std::vector<double> dts;            // per level, coarse to fine
  std::vector<double> rms_gaps;       // |u_dt - u_dt/2| at T, RMS over samples
  double order = 0.0;                 // -slope of log2(rms gap) vs level
  double mean_sample_order = 0.0;     // mean of per-sample slopes
  std::size_t samples = 0;
  std::size_t excluded = 0;
};

/// Endpoint gaps between successive bridge-refined levels starting at
/// config.dt. Samples that blow up at any level are excluded; ExclusionBudgetError
/// if more than 5% of them do.
StrongOrderReport strong_order(const SimConfig& config, int levels, std::size_t samples,
                               std::size_t workers = 1);

// Persistence. CSV rows: t, c_1..c_n. Binary: 8-byte magic "NCDTRAJ\0",
// version byte, u64 row count, u64 n, then rows of little-endian f64.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);
void write_trajectory_binary(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_binary(std::istream& is);

}  // namespace ncd
