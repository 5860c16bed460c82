"""Slow-fast stochastic systems with alpha-stable noise: simulation,
averaging-based model reduction, Zakai-type filtering, parameter estimation,
and most-probable-path extraction."""

from slowfast.errors import (
    CFLError,
    ConfigError,
    DegeneracyError,
    NumericsError,
    SlowFastError,
    StabilityError,
)
from slowfast.stable import StableConstants, StableSpec

__version__ = "0.1.0"

__all__ = [
    "CFLError",
    "ConfigError",
    "DegeneracyError",
    "NumericsError",
    "SlowFastError",
    "StabilityError",
    "StableConstants",
    "StableSpec",
    "__version__",
]
