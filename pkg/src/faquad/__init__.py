"""Fast quasi-adiabatic control design and simulation for few-level models."""

from . import dynamics, model, perturbation, protocol, spectral, tg
from .errors import (
    ConfigError,
    DegenerateGap,
    FaquadError,
    FlatGap,
    RootBracketError,
    StepSizeTooCoarse,
)

__version__ = "0.1.0"

__all__ = [
    "model",
    "spectral",
    "protocol",
    "dynamics",
    "perturbation",
    "tg",
    "FaquadError",
    "DegenerateGap",
    "FlatGap",
    "StepSizeTooCoarse",
    "RootBracketError",
    "ConfigError",
    "__version__",
]
