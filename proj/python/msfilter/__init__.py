"""Reduced stochastic filtering for multiscale systems."""

from ._msfilter import (
    LinearTwoScaleParams,
    default_config,
    derived_coefficients,
    equilibrium_stats,
    list_experiments,
    manifold_sigma_sq,
    msm_fit,
    reduced_params_for,
    run_experiment,
    s11_expanded,
    solve_riccati_full,
    solve_riccati_reduced,
    spekf_reduced_params,
    spekf_stability_exponent,
    validate_config,
)

__all__ = [
    "LinearTwoScaleParams",
    "default_config",
    "derived_coefficients",
    "equilibrium_stats",
    "list_experiments",
    "manifold_sigma_sq",
    "msm_fit",
    "reduced_params_for",
    "run_experiment",
    "s11_expanded",
    "solve_riccati_full",
    "solve_riccati_reduced",
    "spekf_reduced_params",
    "spekf_stability_exponent",
    "validate_config",
]
