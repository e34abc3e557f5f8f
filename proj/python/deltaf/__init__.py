"""Closed-form cost change of added constraints in least-squares problems."""

from ._core import (
    Error,
    PhaseSolution,
    Trajectory,
    predict_alignment_cost,
    predict_delta_f,
    predict_delta_f_ld,
    se3,
    simulate_pair,
    solve_alignment,
    solve_least_distance,
    solve_least_norm,
    solve_stacked,
    sweep,
)

__all__ = [
    "Error",
    "PhaseSolution",
    "Trajectory",
    "predict_alignment_cost",
    "predict_delta_f",
    "predict_delta_f_ld",
    "se3",
    "simulate_pair",
    "solve_alignment",
    "solve_least_distance",
    "solve_least_norm",
    "solve_stacked",
    "sweep",
]
