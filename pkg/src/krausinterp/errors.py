"""Exception types raised across the package."""


class KrausInterpError(Exception):
    """Base class for package errors."""


class DimensionError(KrausInterpError, ValueError):
    """Operand shapes are incompatible (non-square, mismatched sizes)."""


class PreconditionError(KrausInterpError, ValueError):
    """An input violates a structural precondition (e.g. not Hermitian)."""


class DomainError(KrausInterpError, ValueError):
    """A scalar parameter is outside its admissible range."""


class SingularInterpolationError(KrausInterpError, ArithmeticError):
    """The interpolation matrix is too ill-conditioned to solve."""

    def __init__(self, message, mus=None, condition=None):
        super().__init__(message)
        self.mus = mus
        self.condition = condition


class NumericalSanityError(KrausInterpError, ArithmeticError):
    """A computed probability distribution is unphysical beyond tolerance."""


class OptimizationFailure(KrausInterpError, RuntimeError):
    """Every optimizer start landed on a penalized (singular) point."""


class ConfigError(KrausInterpError, ValueError):
    """Invalid experiment configuration; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
