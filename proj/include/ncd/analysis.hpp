#pragma once

// Functionals of trajectories. Time integrals use the trapezoid rule on the
// saved grid.

#include <functional>
#include <vector>

#include "ncd/integrators.hpp"

namespace ncd {

/// Trapezoid integral of fn(u(t)) over the saved times.
double time_integral(const Trajectory& traj,
                     const std::function<double(const SpectralField&)>& fn);

/// (integral of |u(t)|_s^2 dt)^(1/2).
double bochner_norm(const Trajectory& traj, SobolevSpace s);

/// Pointwise difference of two trajectories saved on the same times.
Trajectory difference(const Trajectory& a, const Trajectory& b);

/// Terms of the Ito energy balance for E = |u|^2 + eps |u_x|^2:
///   dE + D dt = G dt + dM
/// with D = 2(|u_x|^2 + (N(u), u)) and G = 2|u|^2 + sum_k (P_n g)_k^2 / (1 + eps lambda_k)
/// for the reaction modes (the 2|u|^2 term is absent in Linear mode), and
/// dM = 2 (u, P_n g) dB. For Cubic, (N(u), u) = |u|_L4^4.
struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> dissipation;
  std::vector<double> growth;
  std::vector<double> martingale_increments;  // one per step
};

EnergyLedger energy_ledger(const Trajectory& traj, const BrownianPath& path,
                           const SimConfig& config);

struct EnergyResidual {
  double max_abs = 0.0;
  double cumulative = 0.0;      // sum of the per-step residuals
  std::vector<double> series;   // per step
};

/// residual_j = (E_{j+1} - E_j) + D_j dt - G_j dt - dM_j with left-point
/// evaluation. Requires save_stride == 1.
EnergyResidual energy_residual(const Trajectory& traj, const BrownianPath& path,
                               const SimConfig& config);

/// How u(t + theta) is treated for t + theta > T.
enum class ShiftBoundary {
  ZeroExtension,  // u = 0 outside [0, T]; integrate over [0, T]
  Interior,       // integrate over [0, T - theta] only
};

/// Trapezoid integral of |u(t + m h) - u(t)|_s^2, h the save interval.
double shift_integral(const Trajectory& traj, std::size_t shift, SobolevSpace s,
                      ShiftBoundary boundary = ShiftBoundary::ZeroExtension);

/// sup over theta = h, 2h, ..., <= delta of shift_integral.
/// Requires h <= delta <= 1.
double shift_modulus(const Trajectory& traj, double delta, SobolevSpace s,
                     ShiftBoundary boundary = ShiftBoundary::ZeroExtension);

struct ModulusReport {
  std::vector<double> deltas;
  std::vector<double> values;
  SobolevSpace space = SobolevSpace::Hneg1;
  double slope = 0.0;  // least squares of log m against log delta
};

ModulusReport modulus_curve(const Trajectory& traj, const std::vector<double>& deltas,
                            SobolevSpace s,
                            ShiftBoundary boundary = ShiftBoundary::ZeroExtension);

/// max over saved times of (|u|^2 + eps |u_x|^2)^(p/2).
double sup_energy(const Trajectory& traj, double p, double epsilon);

/// max over saved times of |u|_s^p.
double sup_norm_power(const Trajectory& traj, SobolevSpace s, double p);

}  // namespace ncd
