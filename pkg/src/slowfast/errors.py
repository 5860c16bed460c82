"""Exception hierarchy shared across the toolkit."""


class SlowFastError(Exception):
    """Base class for all toolkit errors."""


class NumericsError(SlowFastError):
    """A numerical computation failed (overflow, non-convergence, degeneracy)."""


class StabilityError(NumericsError):
    """A time step violates an explicit-scheme stability constraint."""


class CFLError(NumericsError):
    """Advection step would move mass farther than one grid cell."""


class DegeneracyError(NumericsError):
    """All particle weights underflowed to zero."""


class ConfigError(SlowFastError):
    """Invalid experiment configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
