"""Exception types shared across the package."""


class RadiuslabError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(RadiuslabError):
    """Operands with incompatible shapes."""

    def __init__(self, left_shape, right_shape, op="operation"):
        self.left_shape = tuple(left_shape)
        self.right_shape = tuple(right_shape)
        super().__init__(
            f"{op}: dimension mismatch {self.left_shape} vs {self.right_shape}"
        )


class NotHermitianError(RadiuslabError):
    """Matrix failed the Hermitian deviation check."""


class NotUnitVectorError(RadiuslabError):
    """Vector norm deviates from 1 beyond tolerance."""


class ConvergenceError(RadiuslabError):
    """Iterative eigensolver failed to converge within the sweep cap."""

    def __init__(self, message, off_diagonal=None):
        self.off_diagonal = off_diagonal
        super().__init__(message)


class DomainError(RadiuslabError):
    """Argument outside a scalar function's domain beyond the clamp window."""


class FunctionFlagError(RadiuslabError):
    """Scalar function lacks a monotonicity/convexity flag an operation requires."""


class QuadratureError(RadiuslabError):
    """Order-doubled quadrature evaluations disagree; both values attached."""

    def __init__(self, message, value_lo=None, value_hi=None):
        self.value_lo = value_lo
        self.value_hi = value_hi
        super().__init__(message)


class MapSpecError(RadiuslabError):
    """Invalid positive-map construction (unitality, isometry, weights, partition)."""


class ConfigError(RadiuslabError):
    """Invalid experiment configuration; message names the offending field."""
