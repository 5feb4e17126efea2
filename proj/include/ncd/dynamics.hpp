#pragma once

// Galerkin drift and diffusion for
//   d(u - eps u_xx) + (-u_xx + F(u)) dt = g(u) dB   on [0, 1], u(0) = u(1) = 0,
// projected onto the first n sine modes. Mode k evolves as
//   dc_k = -(lambda_k c_k + N_k - c_k) / (1 + eps lambda_k) dt
//          + (P_n g(u))_k / (1 + eps lambda_k) dB.

#include <functional>
#include <variant>

#include "ncd/spectral.hpp"

namespace ncd {

/// F(u) = u^3 - u.
struct Cubic {};

/// F(u) = rho(|u|_H1 / R) u^3 - u with a cut-off rho.
struct Truncated {
  double radius;
};

/// Linear forced equation: (1 + eps lambda_k) dc_k + (lambda_k c_k + f_k) dt
/// = g_k dB. No -u term. An empty forcing means f = 0.
struct Linear {
  std::function<SpectralField(double)> forcing;
};

using NonlinearityMode = std::variant<Cubic, Truncated, Linear>;

/// g(u) = gamma * profile.
struct Additive {
  SpectralField profile;
  double gamma;
};

/// g(u) = gamma * u.
struct LinearMult {
  double gamma;
};

/// g(u) = gamma * sin(u), pointwise.
struct SineMult {
  double gamma;
};

using NoiseModel = std::variant<Additive, LinearMult, SineMult>;

/// Growth/Lipschitz constant L with |g(u)|_L2 <= L (1 + |u|_L2).
double lipschitz_constant(const NoiseModel& model);

/// eps is restricted to [0, 1/2].
struct GalerkinState {
  SpectralField field;
  double t = 0.0;
  double epsilon = 0.0;
};

void validate_epsilon(double epsilon);

/// Nodes used for the dealiased cubic of an n-mode field.
inline std::size_t cubic_nodes(std::size_t n_modes) { return 4 * n_modes; }

/// Coefficients of P_n(u^3).
SpectralField cubic_projection(const SpectralField& f);

/// C^1 cut-off: 1 on [0, 1], 0 on [2, inf), 1 - 3s^2 + 2s^3 (s = r - 1) between.
double cutoff(double r);

/// rho(|f|_H1 / R).
double truncation_factor(const SpectralField& f, double radius);

/// N_k: P_n(u^3) for Cubic, rho * P_n(u^3) for Truncated, f_k(t) for Linear.
SpectralField nonlinear_term(const SpectralField& f, double t,
                             const NonlinearityMode& mode);

SpectralField drift(const GalerkinState& state, const NonlinearityMode& mode);

/// P_n g(u). The node count only matters for SineMult; 0 selects 4 n.
SpectralField noise_projection(const SpectralField& f, const NoiseModel& model,
                               std::size_t node_count = 0);

SpectralField diffusion(const GalerkinState& state, const NoiseModel& model);

}  // namespace ncd
