from ._core import (
    Error,
    amplification_bathe,
    amplification_galpha,
    convergence_study,
    galpha_params,
    mass_spring_frequencies,
    modes,
    numerical_amplification,
    override_keys,
    run_cli,
    simulate,
    solve_contact_forces,
    solve_impulses,
    spectral_radius,
    spectral_sweep,
)

__all__ = [
    "Error",
    "amplification_bathe",
    "amplification_galpha",
    "convergence_study",
    "galpha_params",
    "mass_spring_frequencies",
    "modes",
    "numerical_amplification",
    "override_keys",
    "run_cli",
    "simulate",
    "solve_contact_forces",
    "solve_impulses",
    "spectral_radius",
    "spectral_sweep",
]
