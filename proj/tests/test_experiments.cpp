#include <doctest/doctest.h>

#include <cmath>

#include "ncd/error.hpp"
#include "ncd/experiments.hpp"
#include "oracles.hpp"

using namespace ncd;
using doctest::Approx;

namespace {

SimConfig quiet_config(std::size_t n = 6) {
  SimConfig c = default_config(n);
  c.dt = 1.0 / 128;
  c.noise = Additive{SpectralField::unit(n, 1), 0.0};
  return c;
}

SimConfig noisy_config(std::size_t n = 6) {
  SimConfig c = default_config(n);
  c.dt = 1.0 / 128;
  c.seed = 31;
  return c;
}

}  // namespace

TEST_CASE("exclusion budget") {
  CHECK_NOTHROW(check_exclusions(0, 10));
  CHECK_NOTHROW(check_exclusions(5, 100));
  CHECK_THROWS_AS(check_exclusions(6, 100), ExclusionBudgetError);
  try {
    check_exclusions(2, 16);
  } catch (const ExclusionBudgetError& e) {
    CHECK(e.excluded() == 2);
    CHECK(e.samples() == 16);
  }
}

TEST_CASE("sample paths are indexed by the master seed") {
  const SimConfig c = noisy_config();
  CHECK(sample_brownian_path(c, 3) == sample_path(c.horizon, c.dt, derive_seed(c.seed, 3, 0)));
  CHECK(sample_brownian_path(c, 3) != sample_brownian_path(c, 4));
}

TEST_CASE("moments without noise have zero standard error") {
  const MomentReport r = mc_moments(quiet_config(), {0.0, 0.1, 0.5}, {2.0, 4.0}, 16);
  CHECK(r.samples == 16);
  CHECK(r.excluded == std::vector<std::size_t>{0, 0, 0});
  CHECK(r.jensen_ok);
  for (const MomentSeries& s : r.series) {
    REQUIRE(s.by_epsilon.size() == 3);
    for (const Estimate& e : s.by_epsilon) CHECK(e.std_error <= 1e-12 * (1.0 + e.mean));
  }
  // The initial state is the supremum of a decaying deterministic solution.
  const MomentSeries& l2 = r.find("sup_l2", 2.0);
  for (const Estimate& e : l2.by_epsilon) CHECK(e.mean == Approx(0.5));
  CHECK(l2.uniformity_factor == Approx(1.0));
  CHECK_FALSE(l2.upward_trend);
  CHECK(r.find("sup_l2", 4.0).by_epsilon[1].mean == Approx(0.25));
  CHECK_THROWS_AS(r.find("sup_l2", 3.0), ValidationError);
}

TEST_CASE("moment estimates obey Jensen and are worker independent") {
  const SimConfig c = noisy_config();
  const MomentReport a = mc_moments(c, {0.0, 0.2}, {2.0, 4.0}, 24, 1);
  const MomentReport b = mc_moments(c, {0.0, 0.2}, {2.0, 4.0}, 24, 3);
  CHECK(a.jensen_ok);
  for (std::size_t e = 0; e < 2; ++e) {
    const double m2 = a.find("sup_l2", 2.0).by_epsilon[e].mean;
    const double m4 = a.find("sup_l2", 4.0).by_epsilon[e].mean;
    CHECK(m4 >= m2 * m2);
  }
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t j = 0; j < a.series.size(); ++j) {
    for (std::size_t e = 0; e < 2; ++e) {
      CHECK(a.series[j].by_epsilon[e].mean == b.series[j].by_epsilon[e].mean);
      CHECK(a.series[j].by_epsilon[e].std_error == b.series[j].by_epsilon[e].std_error);
    }
  }
}

TEST_CASE("moment preconditions") {
  const SimConfig c = noisy_config();
  CHECK_THROWS_AS(mc_moments(c, {0.0}, {2.0}, 8), ValidationError);
  CHECK_THROWS_AS(mc_moments(c, {0.9}, {2.0}, 16), ValidationError);
  CHECK_THROWS_AS(mc_moments(c, {0.0}, {0.0}, 16), ValidationError);
  CHECK_THROWS_AS(mc_moments(c, {}, {2.0}, 16), ValidationError);
}

TEST_CASE("OU configuration and closed forms") {
  const SimConfig c = ou_config(0.1, 1, 1.0, 1.0, 1e-3);
  CHECK(c.n_modes == 1);
  CHECK(c.u0 == SpectralField::unit(1, 1));
  CHECK(std::holds_alternative<Linear>(c.mode));

  SimConfig det = ou_config(0.1, 1, 0.0, 1.0, 1e-3);
  const OuReport r = ou_oracle_check(det, 1, 4);
  const double mu = oracle::lambda(1) / (1.0 + 0.1 * oracle::lambda(1));
  CHECK(r.mu == Approx(mu).epsilon(1e-14));
  CHECK(r.mu == Approx(4.9671871678).epsilon(1e-10));
  CHECK(r.exact_mean == Approx(oracle::ou_mean(mu, 1.0, 1.0)).epsilon(1e-14));
  CHECK(r.exact_variance == 0.0);
  CHECK(r.mean.std_error == 0.0);
  // Backward Euler on the decay: (1 + mu dt)^(-T/dt).
  CHECK(r.mean.mean == Approx(std::pow(1.0 + mu * 1e-3, -1000.0)).epsilon(1e-10));
  CHECK(r.passed);

  // Smaller eps decays faster.
  const OuReport r0 = ou_oracle_check(ou_config(0.0, 1, 0.0, 1.0, 1e-3), 1, 4);
  CHECK(r0.mean.mean < r.mean.mean);
}

TEST_CASE("OU Monte Carlo agrees with the exact moments") {
  SimConfig c = ou_config(0.1, 2, 1.0, 0.5, 1e-3);
  c.seed = 5;
  const OuReport r = ou_oracle_check(c, 2, 4000);
  const double mu = oracle::lambda(2) / (1.0 + 0.1 * oracle::lambda(2));
  const double sigma = 1.0 / (1.0 + 0.1 * oracle::lambda(2));
  CHECK(r.exact_variance == Approx(oracle::ou_variance(mu, sigma, 0.5)).epsilon(1e-14));
  CHECK(r.tolerance_ratio <= 1.0);
  CHECK(r.passed);
}

TEST_CASE("OU check rejects configurations that are not OU") {
  SimConfig cubic = ou_config(0.1, 1, 1.0, 1.0, 1e-2);
  cubic.mode = Cubic{};
  CHECK_THROWS_AS(ou_oracle_check(cubic, 1, 10), ValidationError);
  SimConfig mult = ou_config(0.1, 1, 1.0, 1.0, 1e-2);
  mult.noise = LinearMult{1.0};
  CHECK_THROWS_AS(ou_oracle_check(mult, 1, 10), ValidationError);
  CHECK_THROWS_AS(ou_oracle_check(ou_config(0.1, 1, 1.0, 1.0, 1e-2), 2, 10), ValidationError);
  CHECK_THROWS_AS(ou_oracle_check(ou_config(0.1, 1, 1.0, 1.0, 1e-2), 1, 1), ValidationError);
}

TEST_CASE("inviscid gap") {
  const SimConfig c = noisy_config();
  const BrownianPath path = sample_brownian_path(c, 0);
  CHECK(inviscid_gap(c, 0.0, path) == 0.0);
  CHECK(inviscid_gap(c, 0.2, path) > inviscid_gap(c, 0.05, path));
  CHECK(inviscid_gap(c, 0.1, derive_seed(c.seed, 0, 0)) == inviscid_gap(c, 0.1, path));

  // Linear, no noise, single mode: both solutions are discrete exponentials.
  SimConfig lin = quiet_config(1);
  lin.mode = Linear{};
  lin.u0 = SpectralField::unit(1, 1);
  const double eps = 0.1;
  const double lam = oracle::lambda(1);
  const double mu = lam / (1.0 + eps * lam);
  const std::size_t steps = 128;
  double integral = 0.0;
  for (std::size_t j = 0; j <= steps; ++j) {
    const double d =
        std::pow(1.0 + mu * lin.dt, -double(j)) - std::pow(1.0 + lam * lin.dt, -double(j));
    integral += (j == 0 || j == steps ? 0.5 : 1.0) * d * d * lin.dt;
  }
  CHECK(inviscid_gap(lin, eps, sample_brownian_path(lin, 0)) ==
        Approx(std::sqrt((1.0 + lam) * integral)).epsilon(1e-10));
}

TEST_CASE("convergence study without noise is deterministic") {
  SimConfig c = quiet_config();
  c.mode = Linear{};
  const double gap = inviscid_gap(c, 0.1, sample_brownian_path(c, 0));
  const ConvergenceReport below = convergence_study(c, {0.1}, 64, gap * 1.01);
  REQUIRE(below.rows.size() == 1);
  CHECK(below.rows[0].median == Approx(gap));
  CHECK(below.rows[0].exceedance == 0.0);
  CHECK(below.delta_source == "configured");
  CHECK(below.passed);
  const ConvergenceReport above = convergence_study(c, {0.1}, 64, gap * 0.99);
  CHECK(above.rows[0].exceedance == 1.0);
  CHECK_FALSE(above.final_exceedance_ok);
  CHECK_FALSE(above.passed);
}

TEST_CASE("convergence study bookkeeping") {
  const SimConfig c = noisy_config();
  const ConvergenceReport r = convergence_study(c, {0.2, 0.1, 0.05}, 64);
  CHECK(r.samples == 64);
  CHECK(r.excluded == 0);
  CHECK(r.rows.size() == 3);
  CHECK(r.gaps.size() == 64);
  CHECK(r.pairwise_decrease.size() == 2);
  CHECK(r.delta_source == "half-median-at-largest-epsilon");
  CHECK(r.delta == Approx(0.5 * r.rows[0].median));
  CHECK(r.medians_decreasing);
  CHECK(r.rows[0].median > r.rows[2].median);

  std::uint64_t digest = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < 64; ++i) {
    digest = (digest ^ checksum(sample_brownian_path(c, i))) * 0x100000001b3ULL;
  }
  CHECK(r.path_digest == digest);

  const ConvergenceReport w = convergence_study(c, {0.2, 0.1, 0.05}, 64, std::nullopt, 0.05,
                                                SobolevSpace::H1, 4);
  CHECK(w.gaps == r.gaps);
  CHECK(w.path_digest == r.path_digest);
}

TEST_CASE("convergence preconditions") {
  const SimConfig c = noisy_config();
  CHECK_THROWS_AS(convergence_study(c, {0.1, 0.2}, 64), ValidationError);
  CHECK_THROWS_AS(convergence_study(c, {0.1, 0.1}, 64), ValidationError);
  CHECK_THROWS_AS(convergence_study(c, {0.2, 0.1}, 32), ValidationError);
  CHECK_THROWS_AS(convergence_study(c, {0.2, 0.1}, 64, -1.0), ValidationError);
}

TEST_CASE("modulus scaling of a smooth deterministic solution") {
  SimConfig c = quiet_config();
  c.epsilon = 0.5;
  // Dyadic deltas sit on the save grid, so the sup is attained at theta = delta.
  const ModulusScalingReport r = modulus_scaling(c, {1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4},
                                                 SobolevSpace::L2, 32, 1, ShiftBoundary::Interior);
  CHECK(r.monotone);
  CHECK(r.slope > 1.8);
  CHECK(r.slope <= 2.0);
  CHECK(r.slope == Approx(r.slope_sup_of_mean));
  for (const Estimate& e : r.mean_modulus) CHECK(e.std_error <= 1e-12 * e.mean);
}

TEST_CASE("modulus scaling with noise") {
  SimConfig c = noisy_config();
  c.epsilon = 0.5;
  const std::vector<double> deltas{0.02, 0.04, 0.08, 0.16};
  const ModulusScalingReport a = modulus_scaling(c, deltas, SobolevSpace::Hneg1, 32);
  const ModulusScalingReport b = modulus_scaling(c, deltas, SobolevSpace::Hneg1, 32, 4);
  CHECK(a.monotone);
  CHECK(a.samples == 32);
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    CHECK(a.mean_modulus[j].mean == b.mean_modulus[j].mean);
    // E sup dominates sup E.
    CHECK(a.mean_modulus[j].mean >= a.sup_of_mean[j] * (1 - 1e-12));
  }
  CHECK_THROWS_AS(modulus_scaling(c, {0.02, 0.04}, SobolevSpace::L2, 32), ValidationError);
  CHECK_THROWS_AS(modulus_scaling(c, deltas, SobolevSpace::L2, 16), ValidationError);
  CHECK_THROWS_AS(modulus_scaling(c, {1e-4, 0.04, 0.08}, SobolevSpace::L2, 32), ValidationError);
}

TEST_CASE("energy check shapes and deterministic order") {
  SimConfig c = noisy_config(8);
  c.dt = 1.0 / 64;
  c.epsilon = 0.1;
  const EnergyCheckReport r = energy_check(c, 3, 4);
  CHECK(r.dts == std::vector<double>{1.0 / 64, 1.0 / 128, 1.0 / 256});
  CHECK(r.deterministic_max_residual.size() == 3);
  CHECK(r.deterministic_ratios.size() == 2);
  CHECK(r.stochastic_ratios.size() == 2);
  CHECK(r.samples == 4);
  for (double ratio : r.deterministic_ratios) {
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
  CHECK_THROWS_AS(energy_check(c, 1, 4), ValidationError);
}

TEST_CASE("without_noise zeroes the intensity only") {
  const SpectralField profile({0.3, 0.4});
  const auto a = std::get<Additive>(without_noise(Additive{profile, 2.0}));
  CHECK(a.gamma == 0.0);
  CHECK(a.profile == profile);
  CHECK(std::get<LinearMult>(without_noise(LinearMult{1.0})).gamma == 0.0);
  CHECK(std::get<SineMult>(without_noise(SineMult{1.0})).gamma == 0.0);
}
