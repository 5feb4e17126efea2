#include "ncd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/stats.hpp"
#include "ncd/error.hpp"

namespace ncd {

namespace {

double trapezoid(const std::vector<double>& values, double h) {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t j = 1; j + 1 < values.size(); ++j) acc += values[j];
  return acc * h;
}

void require_nonempty(const Trajectory& traj) {
  if (traj.size() == 0) throw ValidationError("trajectory is empty");
}

}  // namespace

double time_integral(const Trajectory& traj,
                     const std::function<double(const SpectralField&)>& fn) {
  require_nonempty(traj);
  if (traj.size() < 2) return 0.0;
  std::vector<double> values;
  values.reserve(traj.size());
  for (const auto& f : traj.fields) values.push_back(fn(f));
  // The saved grid is uniform; trapezoid with its spacing.
  return trapezoid(values, traj.save_interval());
}

double bochner_norm(const Trajectory& traj, SobolevSpace s) {
  if (s == SobolevSpace::L4) {
    return std::sqrt(time_integral(traj, [](const SpectralField& f) {
      const double v = norm(f, SobolevSpace::L4);
      return v * v;
    }));
  }
  return std::sqrt(
      time_integral(traj, [s](const SpectralField& f) { return norm_squared(f, s); }));
}

Trajectory difference(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) {
    throw ValidationError("difference: trajectories have different lengths");
  }
  Trajectory out;
  out.config = a.config;
  out.times = a.times;
  out.fields.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a.times[j] != b.times[j]) {
      throw ValidationError("difference: trajectories are saved on different times");
    }
    out.fields.push_back(a.fields[j] - b.fields[j]);
  }
  return out;
}

EnergyLedger energy_ledger(const Trajectory& traj, const BrownianPath& path,
                           const SimConfig& config) {
  require_nonempty(traj);
  if (config.save_stride != 1) {
    throw ValidationError("energy ledger needs every step saved (save_stride = 1, got " +
                          std::to_string(config.save_stride) + ")");
  }
  if (path.steps() + 1 != traj.size()) {
    throw ValidationError("energy ledger: path and trajectory lengths disagree");
  }
  const double eps = config.epsilon;
  const bool reaction = !std::holds_alternative<Linear>(config.mode);
  EnergyLedger ledger;
  ledger.times = traj.times;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const SpectralField& c = traj.fields[j];
    const SpectralField nl = nonlinear_term(c, traj.times[j], config.mode);
    const SpectralField g = noise_projection(c, config.noise);
    double energy = 0.0, grad = 0.0, mass = 0.0, noise_energy = 0.0;
    for (std::size_t i = 0; i < c.n_modes(); ++i) {
      const double lam = eigenvalue(static_cast<int>(i + 1));
      const double c2 = c[i] * c[i];
      energy += (1.0 + eps * lam) * c2;
      grad += lam * c2;
      mass += c2;
      noise_energy += g[i] * g[i] / (1.0 + eps * lam);
    }
    ledger.energy.push_back(energy);
    ledger.dissipation.push_back(2.0 * (grad + inner(nl, c)));
    ledger.growth.push_back((reaction ? 2.0 * mass : 0.0) + noise_energy);
    if (j + 1 < traj.size()) {
      ledger.martingale_increments.push_back(2.0 * inner(c, g) * path.increments[j]);
    }
  }
  return ledger;
}

EnergyResidual energy_residual(const Trajectory& traj, const BrownianPath& path,
                               const SimConfig& config) {
  const EnergyLedger ledger = energy_ledger(traj, path, config);
  EnergyResidual r;
  const double dt = config.dt;
  for (std::size_t j = 0; j + 1 < ledger.energy.size(); ++j) {
    const double res = (ledger.energy[j + 1] - ledger.energy[j]) + ledger.dissipation[j] * dt -
                       ledger.growth[j] * dt - ledger.martingale_increments[j];
    r.series.push_back(res);
    r.cumulative += res;
    r.max_abs = std::max(r.max_abs, std::abs(res));
  }
  return r;
}

double shift_integral(const Trajectory& traj, std::size_t shift, SobolevSpace s,
                      ShiftBoundary boundary) {
  require_nonempty(traj);
  const std::size_t last = traj.size() - 1;
  const double h = traj.save_interval();
  auto sq = [s](const SpectralField& f) {
    if (s == SobolevSpace::L4) {
      const double v = norm(f, s);
      return v * v;
    }
    return norm_squared(f, s);
  };
  std::vector<double> values;
  if (boundary == ShiftBoundary::Interior) {
    if (shift > last) return 0.0;
    for (std::size_t j = 0; j + shift <= last; ++j) {
      values.push_back(sq(traj.fields[j + shift] - traj.fields[j]));
    }
  } else {
    for (std::size_t j = 0; j <= last; ++j) {
      values.push_back(j + shift <= last ? sq(traj.fields[j + shift] - traj.fields[j])
                                         : sq(traj.fields[j]));
    }
  }
  return trapezoid(values, h);
}

double shift_modulus(const Trajectory& traj, double delta, SobolevSpace s,
                     ShiftBoundary boundary) {
  require_nonempty(traj);
  const double h = traj.save_interval();
  if (!(h > 0.0) || delta < h * (1.0 - 1e-9)) {
    throw ValidationError("shift_modulus: delta = " + std::to_string(delta) +
                          " is below the save interval " + std::to_string(h));
  }
  if (delta > 1.0 + 1e-12) {
    throw ValidationError("shift_modulus: delta must be <= 1");
  }
  const auto max_shift = static_cast<std::size_t>(std::floor(delta / h + 1e-9));
  double sup = 0.0;
  for (std::size_t m = 1; m <= max_shift; ++m) {
    sup = std::max(sup, shift_integral(traj, m, s, boundary));
  }
  return sup;
}

ModulusReport modulus_curve(const Trajectory& traj, const std::vector<double>& deltas,
                            SobolevSpace s, ShiftBoundary boundary) {
  ModulusReport report;
  report.space = s;
  report.deltas = deltas;
  std::vector<double> log_d, log_m;
  for (double d : deltas) {
    const double m = shift_modulus(traj, d, s, boundary);
    report.values.push_back(m);
    if (m > 0.0) {
      log_d.push_back(std::log(d));
      log_m.push_back(std::log(m));
    }
  }
  report.slope = log_d.size() >= 2 ? detail::fit_slope(log_d, log_m) : std::nan("");
  return report;
}

double sup_energy(const Trajectory& traj, double p, double epsilon) {
  require_nonempty(traj);
  double sup = 0.0;
  for (const auto& f : traj.fields) {
    const double e = norm_squared(f, SobolevSpace::L2) +
                     epsilon * norm_squared(f, SobolevSpace::H1semi);
    sup = std::max(sup, std::pow(e, 0.5 * p));
  }
  return sup;
}

double sup_norm_power(const Trajectory& traj, SobolevSpace s, double p) {
  require_nonempty(traj);
  double sup = 0.0;
  for (const auto& f : traj.fields) sup = std::max(sup, std::pow(norm(f, s), p));
  return sup;
}

}  // namespace ncd
