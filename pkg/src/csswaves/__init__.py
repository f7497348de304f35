"""Variational solver and verification suite for standing waves of the
Chern-Simons-Schroedinger system on a truncated plane."""

__version__ = "0.1.0"

from .config import RunConfig, load, parse, serialize
from .functional import Problem, energy, gradient_field, make_problem, phi
from .grid import Grid
from .model import make_model
from .operator import PotentialSpec, assemble, split
from .solver import (
    CriticalPointResult,
    SolverConfig,
    find_descent_scale,
    local_linking_probe,
    mountain_pass,
    ray_scan,
    residual_minimize,
    solve,
)

__all__ = [
    "CriticalPointResult",
    "Grid",
    "PotentialSpec",
    "Problem",
    "RunConfig",
    "SolverConfig",
    "__version__",
    "assemble",
    "energy",
    "find_descent_scale",
    "gradient_field",
    "load",
    "local_linking_probe",
    "make_model",
    "make_problem",
    "mountain_pass",
    "parse",
    "phi",
    "ray_scan",
    "residual_minimize",
    "serialize",
    "solve",
    "split",
]
