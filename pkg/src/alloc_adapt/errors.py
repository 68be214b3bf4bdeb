"""Exception types shared across the package."""


class AllocAdaptError(Exception):
    """Base class for all package errors."""


class DimensionError(AllocAdaptError, ValueError):
    """Operand shapes are incompatible."""


class NonFiniteError(AllocAdaptError, ValueError):
    """A NaN or Inf entered or left a computation."""


class SingularMatrixError(AllocAdaptError, ValueError):
    """Matrix is singular (or rank-deficient) to working tolerance."""


class ConvergenceError(AllocAdaptError, RuntimeError):
    """An iterative solver failed to converge within its iteration cap."""


class AssumptionError(AllocAdaptError, ValueError):
    """A stability assumption required by the allocator does not hold."""


class ConfigError(AllocAdaptError, ValueError):
    """A configuration value is missing, malformed, or inconsistent."""
