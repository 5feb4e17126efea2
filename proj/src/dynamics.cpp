#include "ncd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/binary_io.hpp"
#include "ncd/error.hpp"

namespace ncd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double lipschitz_constant(const NoiseModel& model) {
  return std::visit(
      overloaded{
          [](const Additive& m) {
            const double g = std::abs(m.gamma);
            return std::max(g, g * norm(m.profile, SobolevSpace::L2));
          },
          [](const LinearMult& m) { return std::abs(m.gamma); },
          [](const SineMult& m) { return std::abs(m.gamma); },
      },
      model);
}

void validate_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
    throw ValidationError("epsilon = " + detail::format_double(epsilon) +
                          " outside [0, 1/2]; the uniform estimates hold for "
                          "epsilon in [0, 1/2]");
  }
}

SpectralField cubic_projection(const SpectralField& f) {
  const std::size_t n = f.n_modes();
  const SineTransform& plan = sine_transform(n, cubic_nodes(n));
  std::vector<double> grid(plan.node_count());
  plan.synthesize(f.coeffs(), grid);
  for (double& u : grid) u = u * u * u;
  SpectralField out(n);
  plan.analyze(grid, out.coeffs());
  return out;
}

double cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double s = r - 1.0;
  return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

double truncation_factor(const SpectralField& f, double radius) {
  if (!(radius > 0.0)) {
    throw ValidationError("truncation radius R must be positive");
  }
  return cutoff(norm(f, SobolevSpace::H1) / radius);
}

SpectralField nonlinear_term(const SpectralField& f, double t,
                             const NonlinearityMode& mode) {
  return std::visit(
      overloaded{
          [&](const Cubic&) { return cubic_projection(f); },
          [&](const Truncated& m) {
            SpectralField p = cubic_projection(f);
            p *= truncation_factor(f, m.radius);
            return p;
          },
          [&](const Linear& m) {
            if (!m.forcing) return SpectralField(f.n_modes());
            SpectralField forcing = m.forcing(t);
            if (forcing.n_modes() != f.n_modes()) {
              throw ValidationError("linear forcing has " +
                                    std::to_string(forcing.n_modes()) +
                                    " modes, state has " +
                                    std::to_string(f.n_modes()));
            }
            return forcing;
          },
      },
      mode);
}

SpectralField drift(const GalerkinState& state, const NonlinearityMode& mode) {
  const SpectralField& c = state.field;
  const SpectralField nl = nonlinear_term(c, state.t, mode);
  const bool reaction = !std::holds_alternative<Linear>(mode);
  SpectralField a(c.n_modes());
  for (std::size_t i = 0; i < c.n_modes(); ++i) {
    const double lam = eigenvalue(static_cast<int>(i + 1));
    double rhs = lam * c[i] + nl[i];
    if (reaction) rhs -= c[i];
    a[i] = -rhs / (1.0 + state.epsilon * lam);
  }
  return a;
}

SpectralField noise_projection(const SpectralField& f, const NoiseModel& model,
                               std::size_t node_count) {
  const std::size_t n = f.n_modes();
  return std::visit(
      overloaded{
          [&](const Additive& m) {
            if (m.profile.n_modes() != n) {
              throw ValidationError("additive noise profile has " +
                                    std::to_string(m.profile.n_modes()) +
                                    " modes, state has " + std::to_string(n));
            }
            SpectralField g = m.profile;
            g *= m.gamma;
            return g;
          },
          [&](const LinearMult& m) {
            SpectralField g = f;
            g *= m.gamma;
            return g;
          },
          [&](const SineMult& m) {
            const std::size_t nodes = node_count == 0 ? 4 * n : node_count;
            if (nodes < 2 * n) {
              throw ValidationError("noise_projection: need at least 2 n nodes");
            }
            const SineTransform& plan = sine_transform(n, nodes);
            std::vector<double> grid(nodes);
            plan.synthesize(f.coeffs(), grid);
            for (double& u : grid) u = m.gamma * std::sin(u);
            SpectralField g(n);
            plan.analyze(grid, g.coeffs());
            return g;
          },
      },
      model);
}

SpectralField diffusion(const GalerkinState& state, const NoiseModel& model) {
  return helmholtz_solve(noise_projection(state.field, model), state.epsilon);
}

}  // namespace ncd
