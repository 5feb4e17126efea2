#include <doctest/doctest.h>

#include <cmath>
#include <random>

#include "ncd/dynamics.hpp"
#include "ncd/error.hpp"
#include "oracles.hpp"

using namespace ncd;
using doctest::Approx;

namespace {

SpectralField random_field(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  std::vector<double> c(n);
  for (auto& x : c) x = z(rng);
  return SpectralField(c);
}

std::vector<double> as_vector(const SpectralField& f) { return {f.coeffs().begin(), f.coeffs().end()}; }

}  // namespace

TEST_CASE("cubic projection of e1") {
  const SpectralField p = cubic_projection(SpectralField::unit(6, 1));
  const std::vector<double> expected{1.5, 0.0, -0.5, 0.0, 0.0, 0.0};
  const std::vector<double> quad = oracle::project(
      [](double x) { return std::pow(oracle::basis(1, x), 3); }, 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(std::abs(p[k] - expected[k]) < 1e-9);
    CHECK(std::abs(quad[k] - expected[k]) < 1e-9);
  }
  CHECK(cubic_projection(SpectralField(4)) == SpectralField(4));
  const SpectralField p2 = cubic_projection(SpectralField::unit(4, 1, 2.0));
  CHECK(p2[0] == Approx(12.0).epsilon(1e-12));
  CHECK(p2[2] == Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("cubic projection matches quadrature for random band-limited fields") {
  std::mt19937_64 rng(21);
  for (std::size_t n : {2u, 5u, 9u}) {
    const SpectralField f = random_field(rng, n);
    const std::vector<double> c = as_vector(f);
    const std::vector<double> quad = oracle::project(
        [&](double x) { return std::pow(oracle::field_at(c, x), 3); }, static_cast<int>(n));
    const SpectralField p = cubic_projection(f);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(p[k] - quad[k]) < 1e-8);
  }
}

TEST_CASE("cubic homogeneity and dissipativity") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const SpectralField f = random_field(rng, 1 + trial % 16);
    const double c = -2.0 + 0.1 * trial;
    const SpectralField lhs = cubic_projection(c * f);
    const SpectralField rhs = (c * c * c) * cubic_projection(f);
    const double scale = norm(rhs, SobolevSpace::L2) + 1e-300;
    CHECK(norm(lhs - rhs, SobolevSpace::L2) <= 1e-9 * scale);

    const double l4 = norm(f, SobolevSpace::L4);
    const double ip = inner(cubic_projection(f), f);
    CHECK(ip >= 0.0);
    CHECK(ip == Approx(l4 * l4 * l4 * l4).epsilon(1e-9));
  }
}

TEST_CASE("truncation factor") {
  const SpectralField f = SpectralField::unit(3, 1);
  const double h1 = norm(f, SobolevSpace::H1);
  CHECK(truncation_factor(f, h1 / 0.5) == 1.0);
  CHECK(truncation_factor(f, h1 / 3.0) == 0.0);
  CHECK(truncation_factor(f, h1 / 1.5) == Approx(0.5).epsilon(1e-12));
  CHECK(cutoff(1.0) == 1.0);
  CHECK(cutoff(2.0) == 0.0);
  CHECK_THROWS_AS(truncation_factor(f, 0.0), ValidationError);
  // C1 at both joins.
  const double h = 1e-6;
  CHECK(std::abs(cutoff(1.0 + h) - 1.0) < 1e-10);
  CHECK(std::abs(cutoff(2.0 - h)) < 1e-10);
}

TEST_CASE("drift examples") {
  const SpectralField e1 = SpectralField::unit(4, 1);
  const SpectralField a = drift({e1, 0.0, 0.0}, Cubic{});
  CHECK(a[0] == Approx(-10.3696044011).epsilon(1e-11));
  CHECK(a[2] == Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(a[1]) < 1e-12);

  const SpectralField lin = drift({e1, 0.0, 0.0}, Linear{});
  CHECK(lin[0] == Approx(-9.8696044011).epsilon(1e-11));
  CHECK(lin[2] == 0.0);

  const SpectralField damped = drift({e1, 0.0, 0.1}, Cubic{});
  CHECK(damped[0] == Approx(-10.3696044011 / (1.0 + 0.1 * oracle::lambda(1))).epsilon(1e-11));
  CHECK(damped[0] == Approx(-5.2188278094).epsilon(1e-10));

  // Linear forcing enters as -f_k / (1 + eps lambda_k).
  Linear forced{[](double t) { return SpectralField({t, 1.0, 0.0, 0.0}); }};
  const SpectralField af = drift({SpectralField(4), 2.0, 0.0}, forced);
  CHECK(af[0] == -2.0);
  CHECK(af[1] == -1.0);
  Linear wrong{[](double) { return SpectralField({1.0}); }};
  CHECK_THROWS_AS(drift({SpectralField(4), 0.0, 0.0}, wrong), ValidationError);
}

TEST_CASE("truncated drift equals cubic drift inside the radius") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const SpectralField f = random_field(rng, 8, 0.3);
    const double r = norm(f, SobolevSpace::H1) * (1.0 + 0.1 * trial);
    const GalerkinState s{f, 0.0, 0.05 * (trial % 10)};
    CHECK(drift(s, Truncated{r}) == drift(s, Cubic{}));
  }
  const SpectralField big = SpectralField::unit(4, 1, 10.0);
  const SpectralField outside = drift({big, 0.0, 0.0}, Truncated{1.0});
  CHECK(outside[0] == Approx(-(oracle::lambda(1) - 1.0) * 10.0));
}

TEST_CASE("drift magnitude decreases with epsilon") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField f = random_field(rng, 10);
    const SpectralField a1 = drift({f, 0.0, 0.05}, Cubic{});
    const SpectralField a2 = drift({f, 0.0, 0.3}, Cubic{});
    for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(a2[k]) <= std::abs(a1[k]));
  }
}

TEST_CASE("epsilon validation cites the admissible range") {
  CHECK_NOTHROW(validate_epsilon(0.0));
  CHECK_NOTHROW(validate_epsilon(0.5));
  CHECK_THROWS_WITH_AS(validate_epsilon(0.9), doctest::Contains("[0, 1/2]"), ValidationError);
  CHECK_THROWS_AS(validate_epsilon(-1e-3), ValidationError);
  CHECK_THROWS_AS(validate_epsilon(std::nan("")), ValidationError);
}

TEST_CASE("noise projection and diffusion") {
  const SpectralField e1 = SpectralField::unit(3, 1);
  const SpectralField any({0.4, -2.0, 1.0});
  CHECK(noise_projection(any, Additive{e1, 0.3}) == SpectralField({0.3, 0.0, 0.0}));
  const SpectralField lm = noise_projection(e1, LinearMult{2.0});
  CHECK(lm[0] == Approx(2.0));
  CHECK(std::abs(lm[1]) < 1e-15);
  CHECK(noise_projection(SpectralField(3), SineMult{1.0}) == SpectralField(3));
  CHECK_THROWS_AS(noise_projection(any, Additive{SpectralField({1.0}), 1.0}), ValidationError);
  CHECK_THROWS_AS(noise_projection(any, SineMult{1.0}, 5), ValidationError);

  // SineMult against quadrature of sin(u).
  const std::vector<double> c{0.8, 0.3, -0.2};
  const std::vector<double> quad =
      oracle::project([&](double x) { return 0.7 * std::sin(oracle::field_at(c, x)); }, 3);
  const SpectralField sm = noise_projection(SpectralField(c), SineMult{0.7}, 512);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(sm[k] - quad[k]) < 1e-9);

  CHECK(diffusion({any, 0.0, 0.0}, LinearMult{1.5}) == noise_projection(any, LinearMult{1.5}));
  CHECK(diffusion({any, 0.0, 0.1}, Additive{e1, 1.0})[0] == Approx(0.5032812832).epsilon(1e-10));
  CHECK(diffusion({any, 0.0, 0.2}, Additive{e1, 0.0}) == SpectralField(3));
}

TEST_CASE("noise models satisfy the linear growth bound with the documented constant") {
  std::mt19937_64 rng(25);
  const SpectralField profile({0.5, 2.0, -1.0, 0.0, 0.3});
  const std::vector<NoiseModel> models{Additive{profile, 0.7}, Additive{profile, -0.1},
                                       LinearMult{1.3}, SineMult{-2.0}};
  for (const auto& m : models) {
    const double L = lipschitz_constant(m);
    for (int trial = 0; trial < 30; ++trial) {
      const SpectralField f = random_field(rng, 5, 0.1 * (1 + trial));
      CHECK(norm(noise_projection(f, m), SobolevSpace::L2) <=
            L * (1.0 + norm(f, SobolevSpace::L2)) * (1 + 1e-12));
    }
  }
  CHECK(lipschitz_constant(Additive{profile, 0.7}) == Approx(0.7 * norm(profile, SobolevSpace::L2)));
  CHECK(lipschitz_constant(Additive{SpectralField({0.1}), -2.0}) == 2.0);
}
