"""Planar 2-rarefaction waves of isentropic Navier-Stokes under periodic perturbations."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    FitQualityError,
    InstabilityError,
    OrderingError,
    VacuumError,
)
from .waves import (
    FanPoint,
    PressureLaw,
    WaveEndStates,
    centered_fan,
    char_speeds,
    complete_end_states,
    riemann_invariants,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "FitQualityError",
    "InstabilityError",
    "OrderingError",
    "VacuumError",
    "FanPoint",
    "PressureLaw",
    "WaveEndStates",
    "centered_fan",
    "char_speeds",
    "complete_end_states",
    "riemann_invariants",
]
