"""Exact and brute-force dynamics of small and giant emitters in a cavity-array waveguide."""

from .bound_states import BoundState, BoundStateKind, find_bic, find_boc_poles, find_bound_states, residue_bic
from .dynamics import AmplitudeTrace, KernelSpec, alpha_exact, alpha_for, kernel_giant, kernel_small, tail_exponent
from .model import ModelParams, Scenario, SimulationGrid, ValidationError, validate

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTrace",
    "BoundState",
    "BoundStateKind",
    "KernelSpec",
    "ModelParams",
    "Scenario",
    "SimulationGrid",
    "ValidationError",
    "alpha_exact",
    "alpha_for",
    "find_bic",
    "find_boc_poles",
    "find_bound_states",
    "kernel_giant",
    "kernel_small",
    "residue_bic",
    "tail_exponent",
    "validate",
]
