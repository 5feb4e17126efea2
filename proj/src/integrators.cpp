#include "ncd/integrators.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "detail/binary_io.hpp"
#include "detail/parallel.hpp"
#include "detail/stats.hpp"
#include "ncd/error.hpp"

namespace ncd {

namespace {

constexpr char kTrajMagic[9] = "NCDTRAJ";
constexpr std::uint8_t kTrajVersion = 1;

void check_finite(const SpectralField& f, double t) {
  if (!f.is_finite()) {
    throw BlowUpError(t, "L2 norm", norm(f, SobolevSpace::L2));
  }
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "tamed" || name == "TamedEM") return Scheme::TamedEM;
  if (name == "semi-implicit" || name == "SemiImplicitEM") return Scheme::SemiImplicitEM;
  throw ValidationError("unknown scheme '" + std::string(name) +
                        "' (expected 'tamed' or 'semi-implicit')");
}

std::string_view to_string(Scheme s) {
  return s == Scheme::TamedEM ? "tamed" : "semi-implicit";
}

SpectralField default_initial_data(std::size_t n_modes) {
  return SpectralField::unit(n_modes, 1, std::numbers::sqrt2 / 2.0);
}

SimConfig default_config(std::size_t n_modes) {
  SimConfig c;
  c.n_modes = n_modes;
  c.noise = Additive{SpectralField::unit(n_modes, 1), 0.3};
  c.u0 = default_initial_data(n_modes);
  return c;
}

void SimConfig::validate() const {
  validate_epsilon(epsilon);
  if (n_modes < 1) throw ValidationError("n_modes must be >= 1");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(horizon >= 0.0)) throw ValidationError("T must be non-negative");
  const std::size_t n_steps = step_count(horizon, dt);
  if (save_stride < 1) throw ValidationError("save_stride must be >= 1");
  if (n_steps % save_stride != 0) {
    throw ValidationError("save_stride = " + std::to_string(save_stride) +
                          " does not divide the step count " + std::to_string(n_steps));
  }
  if (u0.n_modes() != n_modes) {
    throw ValidationError("u0 has " + std::to_string(u0.n_modes()) + " modes, n_modes is " +
                          std::to_string(n_modes));
  }
  if (!u0.is_finite()) throw ValidationError("u0 must be finite");
  if (const auto* t = std::get_if<Truncated>(&mode); t && !(t->radius > 0.0)) {
    throw ValidationError("truncation radius R must be positive");
  }
  if (const auto* a = std::get_if<Additive>(&noise); a && a->profile.n_modes() != n_modes) {
    throw ValidationError("noise profile has " + std::to_string(a->profile.n_modes()) +
                          " modes, n_modes is " + std::to_string(n_modes));
  }
}

double Trajectory::save_interval() const {
  if (times.size() < 2) return 0.0;
  return times[1] - times[0];
}

GalerkinState step(const GalerkinState& state, double dB, double dt, Scheme scheme,
                   const NonlinearityMode& mode, const NoiseModel& noise) {
  if (!(dt > 0.0)) throw ValidationError("step: dt must be positive");
  const SpectralField& c = state.field;
  const SpectralField b = diffusion(state, noise);
  GalerkinState next{SpectralField(c.n_modes()), state.t + dt, state.epsilon};
  SpectralField& out = next.field;

  if (scheme == Scheme::TamedEM) {
    const SpectralField a = drift(state, mode);
    const double tame = 1.0 / (1.0 + dt * norm(a, SobolevSpace::L2));
    for (std::size_t i = 0; i < c.n_modes(); ++i) {
      out[i] = c[i] + dt * a[i] * tame + b[i] * dB;
    }
  } else {
    const SpectralField nl = nonlinear_term(c, state.t, mode);
    const bool reaction = !std::holds_alternative<Linear>(mode);
    for (std::size_t i = 0; i < c.n_modes(); ++i) {
      const double lam = eigenvalue(static_cast<int>(i + 1));
      const double h = 1.0 / (1.0 + state.epsilon * lam);
      const double explicit_part = reaction ? (c[i] - nl[i]) * h : -nl[i] * h;
      out[i] = (c[i] + dt * explicit_part + b[i] * dB) / (1.0 + dt * lam * h);
    }
  }
  check_finite(out, next.t);
  return next;
}

namespace {

void check_path(const SimConfig& config, const BrownianPath& path) {
  if (std::abs(path.dt - config.dt) > 1e-12 * config.dt) {
    throw ValidationError("path dt " + detail::format_double(path.dt) +
                          " differs from config dt " + detail::format_double(config.dt));
  }
  if (path.steps() != config.steps()) {
    throw ValidationError("path has " + std::to_string(path.steps()) + " steps, config needs " +
                          std::to_string(config.steps()));
  }
}

}  // namespace

Trajectory simulate(const SimConfig& config, const BrownianPath& path) {
  config.validate();
  check_path(config, path);
  Trajectory traj;
  traj.config = std::make_shared<const SimConfig>(config);
  const std::size_t n_steps = path.steps();
  traj.times.reserve(n_steps / config.save_stride + 1);
  traj.fields.reserve(n_steps / config.save_stride + 1);

  GalerkinState state{config.u0, 0.0, config.epsilon};
  traj.times.push_back(0.0);
  traj.fields.push_back(state.field);
  for (std::size_t i = 0; i < n_steps; ++i) {
    state = step(state, path.increments[i], config.dt, config.scheme, config.mode, config.noise);
    state.t = static_cast<double>(i + 1) * config.dt;
    if ((i + 1) % config.save_stride == 0) {
      traj.times.push_back(state.t);
      traj.fields.push_back(state.field);
    }
  }
  return traj;
}

SpectralField simulate_endpoint(const SimConfig& config, const BrownianPath& path) {
  config.validate();
  check_path(config, path);
  GalerkinState state{config.u0, 0.0, config.epsilon};
  for (std::size_t i = 0; i < path.steps(); ++i) {
    state = step(state, path.increments[i], config.dt, config.scheme, config.mode, config.noise);
    state.t = static_cast<double>(i + 1) * config.dt;
  }
  return state.field;
}

StrongOrderReport strong_order(const SimConfig& config, int levels, std::size_t samples,
                               std::size_t workers) {
  if (levels < 3) throw ValidationError("strong_order: need at least 3 levels");
  if (samples < 1) throw ValidationError("strong_order: need at least one sample");
  config.validate();
  const auto n_levels = static_cast<std::size_t>(levels);

  // gaps[i][l] = |u_l(T) - u_{l+1}(T)|_L2 for sample i; empty when excluded.
  std::vector<std::vector<double>> gaps(samples);
  detail::parallel_for(samples, workers, [&](std::size_t i) {
    BrownianPath path = sample_path(config.horizon, config.dt, derive_seed(config.seed, i, 0));
    SimConfig level_config = config;
    level_config.save_stride = 1;
    std::vector<SpectralField> ends;
    try {
      for (std::size_t l = 0; l < n_levels; ++l) {
        if (l > 0) path = refine(path);
        level_config.dt = path.dt;
        ends.push_back(simulate_endpoint(level_config, path));
      }
    } catch (const BlowUpError&) {
      return;
    }
    std::vector<double> g;
    for (std::size_t l = 0; l + 1 < n_levels; ++l) {
      g.push_back(norm(ends[l] - ends[l + 1], SobolevSpace::L2));
    }
    gaps[i] = std::move(g);
  });

  StrongOrderReport report;
  report.samples = samples;
  for (std::size_t l = 0; l < n_levels; ++l) {
    report.dts.push_back(config.dt / std::ldexp(1.0, static_cast<int>(l)));
  }
  std::vector<double> sum_sq(n_levels - 1, 0.0);
  std::vector<double> level_index(n_levels - 1);
  for (std::size_t l = 0; l + 1 < n_levels; ++l) level_index[l] = static_cast<double>(l);
  std::size_t used = 0;
  double slope_sum = 0.0;
  std::size_t slope_count = 0;
  for (const auto& g : gaps) {
    if (g.empty()) {
      ++report.excluded;
      continue;
    }
    ++used;
    bool positive = true;
    std::vector<double> logs;
    for (std::size_t l = 0; l < g.size(); ++l) {
      sum_sq[l] += g[l] * g[l];
      positive = positive && g[l] > 0.0;
      logs.push_back(positive ? std::log2(g[l]) : 0.0);
    }
    if (positive) {
      slope_sum += -detail::fit_slope(level_index, logs);
      ++slope_count;
    }
  }
  check_exclusions(report.excluded, samples);
  std::vector<double> log_rms;
  for (double s : sum_sq) {
    const double rms = std::sqrt(s / static_cast<double>(used));
    report.rms_gaps.push_back(rms);
    log_rms.push_back(std::log2(rms));
  }
  report.order = -detail::fit_slope(level_index, log_rms);
  report.mean_sample_order =
      slope_count > 0 ? slope_sum / static_cast<double>(slope_count) : std::nan("");
  return report;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.fields.empty() ? 0 : traj.fields.front().n_modes();
  os << 't';
  for (std::size_t k = 1; k <= n; ++k) os << ",c" << k;
  os << '\n';
  for (std::size_t j = 0; j < traj.size(); ++j) {
    os << detail::format_double(traj.times[j]);
    for (double c : traj.fields[j].coeffs()) os << ',' << detail::format_double(c);
    os << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  Trajectory traj;
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != 't') {
    throw ValidationError("trajectory CSV: missing header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    traj.times.push_back(detail::parse_double(cell));
    std::vector<double> coeffs;
    while (std::getline(row, cell, ',')) coeffs.push_back(detail::parse_double(cell));
    traj.fields.emplace_back(std::move(coeffs));
  }
  return traj;
}

void write_trajectory_binary(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.fields.empty() ? 0 : traj.fields.front().n_modes();
  detail::put_magic(os, kTrajMagic, kTrajVersion);
  detail::put_u64(os, traj.size());
  detail::put_u64(os, n);
  for (std::size_t j = 0; j < traj.size(); ++j) {
    detail::put_f64(os, traj.times[j]);
    for (double c : traj.fields[j].coeffs()) detail::put_f64(os, c);
  }
}

Trajectory read_trajectory_binary(std::istream& is) {
  const std::uint8_t version = detail::expect_magic(is, kTrajMagic);
  if (version != kTrajVersion) {
    throw ValidationError("unsupported trajectory format version " + std::to_string(version));
  }
  Trajectory traj;
  const std::uint64_t rows = detail::get_u64(is);
  const std::uint64_t n = detail::get_u64(is);
  for (std::uint64_t j = 0; j < rows; ++j) {
    traj.times.push_back(detail::get_f64(is));
    std::vector<double> coeffs(n);
    for (double& c : coeffs) c = detail::get_f64(is);
    traj.fields.emplace_back(std::move(coeffs));
  }
  return traj;
}

}  // namespace ncd
