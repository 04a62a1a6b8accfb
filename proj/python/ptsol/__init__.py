"""Soliton stability toolkit (Python bindings)."""

from ._ptsol import (
    Family,
    Grid,
    PtsolError,
    __version__,
    analyze_stability,
    block_operator,
    continuous_band,
    error_code,
    evaluate_solution,
    fourier_diff_matrix,
    measure_growth,
    perturb,
    power_flow,
    propagate,
    run_sweep,
    sample_potential,
    select_step,
    solve_constraints,
    spectral_derivative,
    stationary_residual,
)

__all__ = [
    "Family",
    "Grid",
    "PtsolError",
    "__version__",
    "analyze_stability",
    "block_operator",
    "continuous_band",
    "error_code",
    "evaluate_solution",
    "fourier_diff_matrix",
    "measure_growth",
    "perturb",
    "power_flow",
    "propagate",
    "run_sweep",
    "sample_potential",
    "select_step",
    "solve_constraints",
    "spectral_derivative",
    "stationary_residual",
]
