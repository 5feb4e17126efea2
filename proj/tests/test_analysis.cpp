#include <doctest/doctest.h>

#include <cmath>

#include "ncd/analysis.hpp"
#include "ncd/error.hpp"
#include "oracles.hpp"

using namespace ncd;
using doctest::Approx;

namespace {

// u(t) = fn(t) e_1 on [0, 1] sampled every 1 / steps.
Trajectory scalar_trajectory(std::size_t steps, const std::function<double(double)>& fn) {
  Trajectory t;
  for (std::size_t j = 0; j <= steps; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(steps);
    t.times.push_back(s);
    t.fields.push_back(SpectralField::unit(2, 1, fn(s)));
  }
  return t;
}

BrownianPath zero_path(double horizon, double dt) {
  BrownianPath p;
  p.dt = dt;
  p.increments.assign(step_count(horizon, dt), 0.0);
  return p;
}

}  // namespace

TEST_CASE("Bochner norms of closed-form trajectories") {
  CHECK(bochner_norm(scalar_trajectory(100, [](double) { return 1.0; }), SobolevSpace::L2) ==
        Approx(1.0).epsilon(1e-14));
  CHECK(bochner_norm(scalar_trajectory(100, [](double) { return 0.0; }), SobolevSpace::H1) == 0.0);
  const Trajectory ramp = scalar_trajectory(1000, [](double t) { return t; });
  CHECK(std::abs(bochner_norm(ramp, SobolevSpace::L2) - 0.5773502692) < 1e-6);
  CHECK(bochner_norm(ramp, SobolevSpace::H1semi) ==
        Approx(oracle::pi * bochner_norm(ramp, SobolevSpace::L2)));
  CHECK(bochner_norm(ramp, SobolevSpace::L4) ==
        Approx(std::pow(1.5, 0.25) * bochner_norm(ramp, SobolevSpace::L2)).epsilon(1e-12));
  CHECK_THROWS_AS(bochner_norm(Trajectory{}, SobolevSpace::L2), ValidationError);
}

TEST_CASE("Bochner norm dominance") {
  SimConfig c = default_config(12);
  c.dt = 1.0 / 200;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Trajectory t = simulate(c, sample_path(c.horizon, c.dt, seed));
    CHECK(bochner_norm(t, SobolevSpace::Hneg1) <=
          bochner_norm(t, SobolevSpace::L2) / oracle::pi * (1 + 1e-14));
  }
}

TEST_CASE("difference of trajectories") {
  const Trajectory a = scalar_trajectory(10, [](double t) { return t; });
  const Trajectory b = scalar_trajectory(10, [](double t) { return 2 * t; });
  const Trajectory d = difference(b, a);
  CHECK(d.fields[5][0] == Approx(0.5));
  CHECK_THROWS_AS(difference(a, scalar_trajectory(20, [](double) { return 0.0; })),
                  ValidationError);
}

TEST_CASE("shift modulus closed forms") {
  const Trajectory constant = scalar_trajectory(100, [](double) { return 1.0; });
  CHECK(shift_modulus(constant, 0.1, SobolevSpace::L2, ShiftBoundary::Interior) == 0.0);
  // Zero extension sees the jump at T: the tail contributes theta |u|^2.
  CHECK(shift_modulus(constant, 0.1, SobolevSpace::L2) == Approx(0.1).epsilon(0.06));

  const Trajectory ramp = scalar_trajectory(1000, [](double t) { return t; });
  for (std::size_t m : {10u, 50u, 200u}) {
    const double theta = m / 1000.0;
    CHECK(shift_integral(ramp, m, SobolevSpace::L2, ShiftBoundary::Interior) ==
          Approx(theta * theta * (1 - theta)).epsilon(1e-10));
    const double zero_ext =
        theta * theta * (1 - theta) + (1.0 - std::pow(1.0 - theta, 3)) / 3.0;
    CHECK(shift_integral(ramp, m, SobolevSpace::L2) == Approx(zero_ext).epsilon(1e-2));
  }
  CHECK(shift_modulus(ramp, 0.05, SobolevSpace::L2, ShiftBoundary::Interior) ==
        Approx(0.05 * 0.05 * 0.95).epsilon(1e-10));
  CHECK(shift_integral(ramp, 1001, SobolevSpace::L2, ShiftBoundary::Interior) == 0.0);

  CHECK_THROWS_AS(shift_modulus(ramp, 1e-4, SobolevSpace::L2), ValidationError);
  CHECK_THROWS_AS(shift_modulus(ramp, 1.5, SobolevSpace::L2), ValidationError);
}

TEST_CASE("shift modulus is nondecreasing in delta") {
  SimConfig c = default_config(8);
  c.dt = 1.0 / 256;
  const Trajectory t = simulate(c, sample_path(c.horizon, c.dt, 4));
  for (auto boundary : {ShiftBoundary::ZeroExtension, ShiftBoundary::Interior}) {
    double prev = 0.0;
    for (double d : {0.01, 0.02, 0.05, 0.1, 0.3, 1.0}) {
      const double m = shift_modulus(t, d, SobolevSpace::Hneg1, boundary);
      CHECK(m >= prev);
      prev = m;
    }
  }
  const ModulusReport r = modulus_curve(t, {0.02, 0.04, 0.08}, SobolevSpace::L2);
  CHECK(r.values.size() == 3);
  CHECK(r.values[0] <= r.values[2]);
  CHECK(std::isfinite(r.slope));
}

TEST_CASE("smooth trajectories have a quadratic modulus") {
  const Trajectory ramp = scalar_trajectory(1000, [](double t) { return std::sin(t); });
  const ModulusReport r = modulus_curve(ramp, {0.02, 0.04, 0.08, 0.16}, SobolevSpace::L2,
                                        ShiftBoundary::Interior);
  CHECK(r.slope == Approx(2.0).epsilon(0.05));
}

TEST_CASE("sup energy") {
  const Trajectory constant = scalar_trajectory(10, [](double) { return 1.0; });
  CHECK(sup_energy(constant, 2.0, 0.0) == Approx(1.0));
  CHECK(sup_energy(constant, 2.0, 0.5) == Approx(5.9348022006).epsilon(1e-10));
  CHECK(sup_energy(constant, 4.0, 0.5) == Approx(5.9348022006 * 5.9348022006).epsilon(1e-10));
  const Trajectory ramp = scalar_trajectory(10, [](double t) { return 1.0 - t; });
  CHECK(sup_norm_power(ramp, SobolevSpace::L2, 3.0) == Approx(1.0));
}

TEST_CASE("energy ledger alignment and validation") {
  SimConfig c = default_config(8);
  c.dt = 1.0 / 100;
  const BrownianPath path = sample_path(c.horizon, c.dt, 2);
  const Trajectory t = simulate(c, path);
  const EnergyLedger ledger = energy_ledger(t, path, c);
  CHECK(ledger.energy.size() == t.size());
  CHECK(ledger.dissipation.size() == t.size());
  CHECK(ledger.growth.size() == t.size());
  CHECK(ledger.martingale_increments.size() == path.steps());
  // Cubic dissipation is 2(|u_x|^2 + |u|_L4^4).
  const double l4 = norm(t.fields[3], SobolevSpace::L4);
  CHECK(ledger.dissipation[3] ==
        Approx(2 * (norm_squared(t.fields[3], SobolevSpace::H1semi) + l4 * l4 * l4 * l4)));

  SimConfig strided = c;
  strided.save_stride = 2;
  CHECK_THROWS_AS(energy_residual(simulate(strided, path), path, strided), ValidationError);
  CHECK_THROWS_AS(energy_residual(t, sample_path(0.5, c.dt, 2), c), ValidationError);
}

TEST_CASE("energy residual vanishes from rest without noise") {
  SimConfig c = default_config(8);
  c.u0 = SpectralField(8);
  c.noise = Additive{SpectralField::unit(8, 1), 0.0};
  const BrownianPath path = zero_path(c.horizon, c.dt);
  const EnergyResidual r = energy_residual(simulate(c, path), path, c);
  CHECK(r.max_abs == 0.0);
  CHECK(r.cumulative == 0.0);
}

TEST_CASE("deterministic energy residual is second order per step") {
  for (const NonlinearityMode& mode : {NonlinearityMode{Linear{}}, NonlinearityMode{Cubic{}}}) {
    SimConfig c = default_config(16);
    c.epsilon = 0.1;
    c.mode = mode;
    c.noise = Additive{SpectralField::unit(16, 1), 0.0};
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
      c.dt = 2e-3 / std::ldexp(1.0, level);
      const BrownianPath path = zero_path(c.horizon, c.dt);
      const double res = energy_residual(simulate(c, path), path, c).max_abs;
      if (level > 0) {
        CHECK(prev / res >= 3.5);
        CHECK(prev / res <= 4.5);
      }
      prev = res;
    }
  }
}
