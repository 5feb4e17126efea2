"""Spectral Galerkin solver and Monte Carlo experiments for the stochastic
nonclassical diffusion equation on (0, 1) with Dirichlet boundary conditions.

Coefficient vectors are float64 numpy arrays in the basis
e_k(x) = sqrt(2) sin(k pi x). Experiment functions return the same report
dictionaries the command-line tool writes as JSON.
"""

import json

from ._core import (
    Additive,
    BlowUpError,
    BrownianPath,
    Cubic,
    ExclusionBudgetError,
    Linear,
    LinearMult,
    SimConfig,
    SineMult,
    Trajectory,
    Truncated,
    ValidationError,
    analyze,
    bochner_norm,
    coarsen,
    cubic_projection,
    derive_seed,
    drift,
    eigenvalue,
    energy_residual,
    eval_basis,
    helmholtz_solve,
    norm,
    ou_config,
    refine,
    sample_brownian_path,
    sample_path,
    shift_modulus,
    simulate,
    synthesize,
)
from . import _core

__all__ = [
    "Additive", "BlowUpError", "BrownianPath", "Cubic", "ExclusionBudgetError", "Linear",
    "LinearMult", "SimConfig", "SineMult", "Trajectory", "Truncated", "ValidationError",
    "analyze", "bochner_norm", "coarsen", "convergence_study", "cubic_projection",
    "derive_seed", "drift", "eigenvalue", "energy_check", "energy_residual", "eval_basis",
    "helmholtz_solve", "mc_moments", "modulus_scaling", "norm", "ou_check", "ou_config",
    "refine", "sample_brownian_path", "sample_path", "shift_modulus", "simulate",
    "strong_order", "synthesize",
]


def mc_moments(config, epsilons=(0.0, 0.01, 0.1, 0.5), ps=(2.0, 4.0), samples=64, workers=1):
    return json.loads(_core._mc_moments(config, list(epsilons), list(ps), samples, workers))


def ou_check(config, k=1, samples=10000, workers=1):
    return json.loads(_core._ou_check(config, k, samples, workers))


def modulus_scaling(config, deltas=(0.02, 0.04, 0.08, 0.16), space="Hneg1", samples=32,
                    workers=1, interior=False):
    return json.loads(
        _core._modulus_scaling(config, list(deltas), space, samples, workers, interior))


def convergence_study(config, epsilons=(0.2, 0.1, 0.05, 0.025), samples=64, delta=None,
                      threshold=0.05, space="H1", workers=1):
    return json.loads(
        _core._convergence_study(config, list(epsilons), samples, delta, threshold, space,
                                 workers))


def energy_check(config, levels=4, samples=100, workers=1):
    return json.loads(_core._energy_check(config, levels, samples, workers))


def strong_order(config, levels=4, samples=32, workers=1):
    return json.loads(_core._strong_order(config, levels, samples, workers))
