"""Coupled scalar conservation law laboratory: python bindings."""

from ._synclaw import (
    P_INF,
    Field,
    FluxModel,
    Grid,
    NoiseMode,
    NoisePath,
    NoiseSpec,
    PairTrajectory,
    Psi0Spec,
    SolverConfig,
    Trajectory,
    boundary_normal_gradient,
    build_grid,
    burgers_model,
    check_coercivity,
    check_growth,
    coercive_quadratic_model,
    couple_evolve,
    estimate_lyapunov,
    estimate_p_inf,
    evolve,
    field_from_values,
    girsanov_bound_value,
    implicit_diffusion_step,
    kernel_mass_loss,
    linear_flux_model,
    lp_norm,
    make_field,
    make_noise_spec,
    replay_manifest,
    run_config_text,
    sample_field,
    sample_path,
    secant_slope,
    simulate_exit,
    zero_flux_model,
)

__all__ = [
    "P_INF",
    "Field",
    "FluxModel",
    "Grid",
    "NoiseMode",
    "NoisePath",
    "NoiseSpec",
    "PairTrajectory",
    "Psi0Spec",
    "SolverConfig",
    "Trajectory",
    "boundary_normal_gradient",
    "build_grid",
    "burgers_model",
    "check_coercivity",
    "check_growth",
    "coercive_quadratic_model",
    "couple_evolve",
    "estimate_lyapunov",
    "estimate_p_inf",
    "evolve",
    "field_from_values",
    "girsanov_bound_value",
    "implicit_diffusion_step",
    "kernel_mass_loss",
    "linear_flux_model",
    "lp_norm",
    "make_field",
    "make_noise_spec",
    "replay_manifest",
    "run_config_text",
    "sample_field",
    "sample_path",
    "secant_slope",
    "simulate_exit",
    "zero_flux_model",
]
