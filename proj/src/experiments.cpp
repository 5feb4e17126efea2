#include "ncd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "detail/parallel.hpp"
#include "detail/stats.hpp"
#include "ncd/error.hpp"
#include "ncd/report.hpp"

namespace ncd {

namespace {

Estimate to_estimate(const std::vector<double>& xs) {
  const detail::MeanEstimate e = detail::estimate_mean(xs);
  return {e.mean, e.std_error};
}

void require_samples(std::size_t samples, std::size_t minimum, const char* what) {
  if (samples < minimum) {
    throw ValidationError(std::string(what) + ": samples must be >= " + std::to_string(minimum) +
                          " (got " + std::to_string(samples) + ")");
  }
}

void require_epsilons(const std::vector<double>& epsilons, const char* what) {
  if (epsilons.empty()) throw ValidationError(std::string(what) + ": epsilon grid is empty");
  for (double e : epsilons) validate_epsilon(e);
}

SimConfig with_epsilon(const SimConfig& config, double epsilon) {
  SimConfig c = config;
  c.epsilon = epsilon;
  return c;
}

double uniformity(const std::vector<Estimate>& xs) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& x : xs) {
    lo = std::min(lo, x.mean);
    hi = std::max(hi, x.mean);
  }
  if (hi == 0.0) return 1.0;
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// True if every step toward smaller epsilon rises by more than two combined
// standard errors.
bool upward_trend(const std::vector<double>& epsilons, const std::vector<Estimate>& xs) {
  if (xs.size() < 2) return false;
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return epsilons[a] > epsilons[b]; });
  for (std::size_t j = 0; j + 1 < order.size(); ++j) {
    const Estimate& big = xs[order[j]];
    const Estimate& small = xs[order[j + 1]];
    const double band = 2.0 * std::hypot(big.std_error, small.std_error);
    if (!(small.mean - big.mean > band)) return false;
  }
  return true;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  return lx.size() >= 2 ? detail::fit_slope(lx, ly) : std::nan("");
}

}  // namespace

BrownianPath sample_brownian_path(const SimConfig& config, std::size_t sample_index) {
  return sample_path(config.horizon, config.dt, derive_seed(config.seed, sample_index, 0));
}

NoiseModel without_noise(const NoiseModel& model) {
  NoiseModel out = model;
  std::visit([](auto& m) { m.gamma = 0.0; }, out);
  return out;
}

// ---------------------------------------------------------------------------

const MomentSeries& MomentReport::find(const std::string& quantity, double p) const {
  for (const auto& s : series) {
    if (s.quantity == quantity && s.p == p) return s;
  }
  throw ValidationError("moment report has no series " + quantity + " at p = " +
                        std::to_string(p));
}

MomentReport mc_moments(const SimConfig& config, const std::vector<double>& epsilons,
                        const std::vector<double>& ps, std::size_t samples,
                        std::size_t workers) {
  require_samples(samples, 16, "mc_moments");
  require_epsilons(epsilons, "mc_moments");
  if (ps.empty()) throw ValidationError("mc_moments: p list is empty");
  for (double p : ps) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw ValidationError("mc_moments: p must be positive (got " + std::to_string(p) + ")");
    }
  }
  config.validate();

  const std::size_t n_eps = epsilons.size();
  const std::size_t n_p = ps.size();
  struct Sample {
    std::vector<double> sup_l2, sup_energy, dissipation;
    double h2 = 0.0;
    bool ok = false;
  };
  std::vector<Sample> results(samples * n_eps);

  detail::parallel_for(samples, workers, [&](std::size_t i) {
    const BrownianPath path = sample_brownian_path(config, i);
    for (std::size_t e = 0; e < n_eps; ++e) {
      Sample& out = results[i * n_eps + e];
      Trajectory traj;
      try {
        traj = simulate(with_epsilon(config, epsilons[e]), path);
      } catch (const BlowUpError&) {
        continue;
      }
      const double diss = time_integral(traj, [](const SpectralField& f) {
        const double l4 = norm(f, SobolevSpace::L4);
        return norm_squared(f, SobolevSpace::H1semi) + l4 * l4 * l4 * l4;
      });
      for (double p : ps) {
        out.sup_l2.push_back(sup_norm_power(traj, SobolevSpace::L2, p));
        out.sup_energy.push_back(sup_energy(traj, p, epsilons[e]));
        out.dissipation.push_back(std::pow(diss, 0.5 * p));
      }
      out.h2 = time_integral(
          traj, [](const SpectralField& f) { return norm_squared(f, SobolevSpace::H2); });
      out.ok = true;
    }
  });

  MomentReport report;
  report.epsilons = epsilons;
  report.ps = ps;
  report.samples = samples;
  report.master_seed = config.seed;
  report.config_hash = config_hash(config);
  report.excluded.assign(n_eps, 0);
  for (std::size_t e = 0; e < n_eps; ++e) {
    for (std::size_t i = 0; i < samples; ++i) {
      if (!results[i * n_eps + e].ok) ++report.excluded[e];
    }
    check_exclusions(report.excluded[e], samples);
  }

  auto collect = [&](auto&& pick) {
    std::vector<Estimate> by_eps;
    for (std::size_t e = 0; e < n_eps; ++e) {
      std::vector<double> xs;
      for (std::size_t i = 0; i < samples; ++i) {
        const Sample& s = results[i * n_eps + e];
        if (s.ok) xs.push_back(pick(s));
      }
      by_eps.push_back(to_estimate(xs));
    }
    return by_eps;
  };
  auto add = [&](std::string quantity, double p, std::vector<Estimate> by_eps) {
    MomentSeries s;
    s.quantity = std::move(quantity);
    s.p = p;
    s.uniformity_factor = uniformity(by_eps);
    s.upward_trend = upward_trend(epsilons, by_eps);
    s.by_epsilon = std::move(by_eps);
    report.series.push_back(std::move(s));
  };
  for (std::size_t j = 0; j < n_p; ++j) {
    add("sup_l2", ps[j], collect([j](const Sample& s) { return s.sup_l2[j]; }));
    add("sup_energy", ps[j], collect([j](const Sample& s) { return s.sup_energy[j]; }));
    add("dissipation", ps[j], collect([j](const Sample& s) { return s.dissipation[j]; }));
  }
  add("h2_integral", 2.0, collect([](const Sample& s) { return s.h2; }));

  // Each quantity at q is exactly the quantity at p raised to q / p, sample by
  // sample, so the means obey Jensen on the shared sample set.
  for (const char* q : {"sup_l2", "sup_energy", "dissipation"}) {
    for (std::size_t a = 0; a < n_p; ++a) {
      for (std::size_t b = 0; b < n_p; ++b) {
        if (!(ps[a] < ps[b])) continue;
        const auto& lo = report.find(q, ps[a]);
        const auto& hi = report.find(q, ps[b]);
        for (std::size_t e = 0; e < n_eps; ++e) {
          const double bound = std::pow(lo.by_epsilon[e].mean, ps[b] / ps[a]);
          if (hi.by_epsilon[e].mean < bound * (1.0 - 1e-12)) report.jensen_ok = false;
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

SimConfig ou_config(double epsilon, int k, double gamma, double horizon, double dt, double c0) {
  if (k < 1) throw ValidationError("ou_config: k must be >= 1");
  const auto n = static_cast<std::size_t>(k);
  SimConfig c = default_config(n);
  c.epsilon = epsilon;
  c.dt = dt;
  c.horizon = horizon;
  c.mode = Linear{};
  c.noise = Additive{SpectralField::unit(n, k), gamma};
  c.u0 = SpectralField::unit(n, k, c0);
  c.save_stride = c.steps();
  return c;
}

OuReport ou_oracle_check(const SimConfig& config, int k, std::size_t samples,
                         std::size_t workers) {
  require_samples(samples, 2, "ou_oracle_check");
  config.validate();
  const auto* linear = std::get_if<Linear>(&config.mode);
  if (linear == nullptr || linear->forcing) {
    throw ValidationError("ou_oracle_check: needs Linear mode with zero forcing");
  }
  const auto* additive = std::get_if<Additive>(&config.noise);
  if (additive == nullptr) throw ValidationError("ou_oracle_check: needs Additive noise");
  if (k < 1 || static_cast<std::size_t>(k) > config.n_modes) {
    throw ValidationError("ou_oracle_check: k = " + std::to_string(k) + " outside 1.." +
                          std::to_string(config.n_modes));
  }
  if (!(additive->profile == SpectralField::unit(config.n_modes, k))) {
    throw ValidationError("ou_oracle_check: noise profile must be e_" + std::to_string(k));
  }

  const std::size_t idx = static_cast<std::size_t>(k - 1);
  std::vector<double> ends(samples);
  std::vector<char> ok(samples, 0);
  detail::parallel_for(samples, workers, [&](std::size_t i) {
    try {
      ends[i] = simulate_endpoint(config, sample_brownian_path(config, i))[idx];
      ok[i] = 1;
    } catch (const BlowUpError&) {
    }
  });
  std::vector<double> xs;
  for (std::size_t i = 0; i < samples; ++i) {
    if (ok[i]) xs.push_back(ends[i]);
  }
  check_exclusions(samples - xs.size(), samples);

  OuReport r;
  r.epsilon = config.epsilon;
  r.k = k;
  r.gamma = additive->gamma;
  r.c0 = config.u0[idx];
  r.horizon = config.horizon;
  r.dt = config.dt;
  r.samples = samples;
  r.master_seed = config.seed;
  r.config_hash = config_hash(config);
  const double lam = eigenvalue(k);
  r.mu = lam / (1.0 + config.epsilon * lam);
  r.sigma = r.gamma / (1.0 + config.epsilon * lam);
  r.exact_mean = r.c0 * std::exp(-r.mu * r.horizon);
  r.exact_variance = r.sigma * r.sigma * -std::expm1(-2.0 * r.mu * r.horizon) / (2.0 * r.mu);

  r.mean = to_estimate(xs);
  const double n = static_cast<double>(xs.size());
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = (x - r.mean.mean) * (x - r.mean.mean);
    m2 += d;
    m4 += d * d;
  }
  const double var = xs.size() > 1 ? m2 / (n - 1.0) : 0.0;
  m4 /= n;
  r.variance = {var, std::sqrt(std::max(0.0, m4 - var * var) / n)};

  r.mean_deviation = std::abs(r.mean.mean - r.exact_mean);
  r.variance_deviation = std::abs(r.variance.mean - r.exact_variance);
  r.variance_relative_deviation =
      r.exact_variance > 0.0 ? r.variance_deviation / r.exact_variance : r.variance_deviation;
  r.mean_tolerance = 3.0 * r.mean.std_error + 0.02 * std::abs(r.exact_mean);
  r.variance_tolerance = 3.0 * r.variance.std_error + 0.02 * r.exact_variance;
  auto ratio = [](double dev, double tol) {
    if (tol > 0.0) return dev / tol;
    return dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  r.tolerance_ratio = std::max(ratio(r.mean_deviation, r.mean_tolerance),
                               ratio(r.variance_deviation, r.variance_tolerance));
  r.passed = r.tolerance_ratio <= 1.0;
  return r;
}

// ---------------------------------------------------------------------------

ModulusScalingReport modulus_scaling(const SimConfig& config, const std::vector<double>& deltas,
                                     SobolevSpace s, std::size_t samples, std::size_t workers,
                                     ShiftBoundary boundary) {
  require_samples(samples, 32, "modulus_scaling");
  if (deltas.size() < 3) throw ValidationError("modulus_scaling: need at least 3 deltas");
  config.validate();
  const double h = config.dt * static_cast<double>(config.save_stride);
  std::vector<std::size_t> max_shift;
  for (double d : deltas) {
    if (!(d > 0.0) || d > 1.0) {
      throw ValidationError("modulus_scaling: delta = " + std::to_string(d) +
                            " outside (0, 1]");
    }
    if (d < h * (1.0 - 1e-9)) {
      throw ValidationError("modulus_scaling: delta = " + std::to_string(d) +
                            " is below the save interval " + std::to_string(h));
    }
    max_shift.push_back(static_cast<std::size_t>(std::floor(d / h + 1e-9)));
  }
  const std::size_t m_max = *std::max_element(max_shift.begin(), max_shift.end());

  // shifts[i][m - 1] = shift integral at theta = m h for sample i.
  std::vector<std::vector<double>> shifts(samples);
  detail::parallel_for(samples, workers, [&](std::size_t i) {
    Trajectory traj;
    try {
      traj = simulate(config, sample_brownian_path(config, i));
    } catch (const BlowUpError&) {
      return;
    }
    std::vector<double> v(m_max);
    for (std::size_t m = 1; m <= m_max; ++m) v[m - 1] = shift_integral(traj, m, s, boundary);
    shifts[i] = std::move(v);
  });

  ModulusScalingReport r;
  r.deltas = deltas;
  r.space = s;
  r.boundary = boundary;
  r.samples = samples;
  r.master_seed = config.seed;
  r.config_hash = config_hash(config);
  std::vector<double> mean_shift(m_max, 0.0);
  std::size_t used = 0;
  for (const auto& v : shifts) {
    if (v.empty()) {
      ++r.excluded;
      continue;
    }
    ++used;
    for (std::size_t m = 0; m < m_max; ++m) mean_shift[m] += v[m];
  }
  check_exclusions(r.excluded, samples);
  for (double& x : mean_shift) x /= static_cast<double>(used);

  std::vector<double> means;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    std::vector<double> sups;
    for (const auto& v : shifts) {
      if (!v.empty()) sups.push_back(*std::max_element(v.begin(), v.begin() + max_shift[d]));
    }
    r.mean_modulus.push_back(to_estimate(sups));
    means.push_back(r.mean_modulus.back().mean);
    r.sup_of_mean.push_back(
        *std::max_element(mean_shift.begin(), mean_shift.begin() + max_shift[d]));
  }
  for (std::size_t a = 0; a < deltas.size(); ++a) {
    for (std::size_t b = 0; b < deltas.size(); ++b) {
      if (deltas[a] < deltas[b] && means[a] > means[b]) r.monotone = false;
    }
  }
  r.slope = log_slope(deltas, means);
  r.slope_sup_of_mean = log_slope(deltas, r.sup_of_mean);
  return r;
}

// ---------------------------------------------------------------------------

double inviscid_gap(const SimConfig& config, double epsilon, const BrownianPath& path,
                    SobolevSpace s) {
  validate_epsilon(epsilon);
  const Trajectory u = simulate(with_epsilon(config, epsilon), path);
  const Trajectory z = simulate(with_epsilon(config, 0.0), path);
  return bochner_norm(difference(u, z), s);
}

double inviscid_gap(const SimConfig& config, double epsilon, std::uint64_t seed,
                    SobolevSpace s) {
  return inviscid_gap(config, epsilon, sample_path(config.horizon, config.dt, seed), s);
}

ConvergenceReport convergence_study(const SimConfig& config, const std::vector<double>& epsilons,
                                    std::size_t samples, std::optional<double> delta,
                                    double exceedance_threshold, SobolevSpace s,
                                    std::size_t workers) {
  require_samples(samples, 64, "convergence_study");
  require_epsilons(epsilons, "convergence_study");
  for (std::size_t j = 0; j + 1 < epsilons.size(); ++j) {
    if (!(epsilons[j + 1] < epsilons[j])) {
      throw ValidationError("convergence_study: epsilon grid must be strictly decreasing");
    }
  }
  if (delta && !(*delta > 0.0)) throw ValidationError("convergence_study: delta must be > 0");
  if (!(exceedance_threshold >= 0.0 && exceedance_threshold <= 1.0)) {
    throw ValidationError("convergence_study: exceedance threshold must lie in [0, 1]");
  }
  config.validate();

  const std::size_t n_eps = epsilons.size();
  std::vector<std::vector<double>> gaps(samples);
  std::vector<std::uint64_t> sums(samples);
  detail::parallel_for(samples, workers, [&](std::size_t i) {
    const BrownianPath path = sample_brownian_path(config, i);
    sums[i] = checksum(path);
    std::vector<double> g;
    try {
      const Trajectory z = simulate(with_epsilon(config, 0.0), path);
      for (double e : epsilons) {
        g.push_back(bochner_norm(difference(simulate(with_epsilon(config, e), path), z), s));
      }
    } catch (const BlowUpError&) {
      return;
    }
    if (checksum(path) != sums[i]) throw std::logic_error("shared Brownian path was modified");
    gaps[i] = std::move(g);
  });

  ConvergenceReport r;
  r.samples = samples;
  r.space = s;
  r.exceedance_threshold = exceedance_threshold;
  r.master_seed = config.seed;
  r.config_hash = config_hash(config);
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  for (std::uint64_t c : sums) digest = (digest ^ c) * 0x100000001b3ULL;
  r.path_digest = digest;
  for (auto& g : gaps) {
    if (g.empty()) {
      ++r.excluded;
    } else {
      r.gaps.push_back(std::move(g));
    }
  }
  check_exclusions(r.excluded, samples);

  std::vector<std::vector<double>> columns(n_eps);
  for (const auto& g : r.gaps) {
    for (std::size_t e = 0; e < n_eps; ++e) columns[e].push_back(g[e]);
  }
  if (delta) {
    r.delta = *delta;
    r.delta_source = "configured";
  } else {
    r.delta = 0.5 * detail::median(columns.front());
    r.delta_source = "half-median-at-largest-epsilon";
  }
  const double used = static_cast<double>(r.gaps.size());
  for (std::size_t e = 0; e < n_eps; ++e) {
    ConvergenceRow row;
    row.epsilon = epsilons[e];
    row.median = detail::median(columns[e]);
    row.mean = detail::estimate_mean(columns[e]).mean;
    std::size_t over = 0;
    for (double g : columns[e]) over += g > r.delta ? 1 : 0;
    row.exceedance = static_cast<double>(over) / used;
    r.rows.push_back(row);
  }
  for (std::size_t e = 0; e + 1 < n_eps; ++e) {
    std::size_t down = 0;
    for (const auto& g : r.gaps) down += g[e + 1] < g[e] ? 1 : 0;
    r.pairwise_decrease.push_back(static_cast<double>(down) / used);
    if (!(r.rows[e + 1].median < r.rows[e].median)) r.medians_decreasing = false;
  }
  r.final_exceedance_ok = r.rows.back().exceedance <= exceedance_threshold;
  r.passed = r.medians_decreasing && r.final_exceedance_ok;
  return r;
}

// ---------------------------------------------------------------------------

EnergyCheckReport energy_check(const SimConfig& config, int levels, std::size_t samples,
                               std::size_t workers) {
  if (levels < 2) throw ValidationError("energy_check: need at least 2 levels");
  require_samples(samples, 1, "energy_check");
  config.validate();
  const auto n_levels = static_cast<std::size_t>(levels);

  SimConfig base = config;
  base.save_stride = 1;
  EnergyCheckReport r;
  r.samples = samples;
  r.master_seed = config.seed;
  r.config_hash = config_hash(config);

  SimConfig quiet = base;
  quiet.noise = without_noise(base.noise);
  for (std::size_t l = 0; l < n_levels; ++l) {
    const double dt = config.dt / std::ldexp(1.0, static_cast<int>(l));
    quiet.dt = dt;
    BrownianPath still;
    still.dt = dt;
    still.increments.assign(quiet.steps(), 0.0);
    still.level = static_cast<int>(l);
    r.dts.push_back(dt);
    r.deterministic_max_residual.push_back(
        energy_residual(simulate(quiet, still), still, quiet).max_abs);
  }

  // cumulative[i][l] for sample i; empty when excluded.
  std::vector<std::vector<double>> cumulative(samples);
  detail::parallel_for(samples, workers, [&](std::size_t i) {
    BrownianPath path = sample_brownian_path(config, i);
    SimConfig c = base;
    std::vector<double> v;
    try {
      for (std::size_t l = 0; l < n_levels; ++l) {
        if (l > 0) path = refine(path);
        c.dt = path.dt;
        v.push_back(energy_residual(simulate(c, path), path, c).cumulative);
      }
    } catch (const BlowUpError&) {
      return;
    }
    cumulative[i] = std::move(v);
  });
  std::vector<double> sum_sq(n_levels, 0.0);
  std::size_t used = 0;
  for (const auto& v : cumulative) {
    if (v.empty()) {
      ++r.excluded;
      continue;
    }
    ++used;
    for (std::size_t l = 0; l < n_levels; ++l) sum_sq[l] += v[l] * v[l];
  }
  check_exclusions(r.excluded, samples);
  for (double s : sum_sq) r.stochastic_rms_cumulative.push_back(std::sqrt(s / double(used)));
  for (std::size_t l = 0; l + 1 < n_levels; ++l) {
    r.deterministic_ratios.push_back(r.deterministic_max_residual[l] /
                                     r.deterministic_max_residual[l + 1]);
    r.stochastic_ratios.push_back(r.stochastic_rms_cumulative[l] /
                                  r.stochastic_rms_cumulative[l + 1]);
  }
  return r;
}

}  // namespace ncd
