"""Singular-control free boundary solver and actor-critic trainer."""

from ._core import (
    DerivedConstants,
    ModelParams,
    NumericError,
    Theta,
    derive_constants,
    entropy,
    gamma,
    gamma_inv,
    iterate_boundary,
    linf_error,
    mc_value_estimate,
    outer_value_v,
    phi,
    phi_theta,
    psi,
    simulate_nonrandomized,
    simulate_randomized,
    train,
    true_theta,
)

__all__ = [
    "DerivedConstants",
    "ModelParams",
    "NumericError",
    "Theta",
    "derive_constants",
    "entropy",
    "gamma",
    "gamma_inv",
    "iterate_boundary",
    "linf_error",
    "mc_value_estimate",
    "outer_value_v",
    "phi",
    "phi_theta",
    "psi",
    "simulate_nonrandomized",
    "simulate_randomized",
    "train",
    "true_theta",
]
