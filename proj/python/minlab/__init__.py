"""Lax-Oleinik evolutions on the circle grid and the statistics built on them."""

from minlab._core import (
    ConfigError,
    NumericError,
    check_embedding,
    circle_hausdorff,
    decay,
    event_probability,
    evolve_values,
    fit_log_linear,
    halving,
    lyapunov,
    proof_constants,
    separation,
    source_sets,
    two_solution,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "NumericError",
    "check_embedding",
    "circle_hausdorff",
    "decay",
    "event_probability",
    "evolve_values",
    "fit_log_linear",
    "halving",
    "lyapunov",
    "proof_constants",
    "separation",
    "source_sets",
    "two_solution",
]
