"""Exception types shared across the package."""


class SpinRingError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(SpinRingError):
    """Ring size exceeds the bitmask width supported by the encoding."""


class EmptySectorError(SpinRingError):
    """Requested sector contains no basis states (or is infeasible)."""


class ValidationError(SpinRingError):
    """Input violates a documented precondition or invariant."""


class BlockShapeError(ValidationError):
    """Density matrix is not block diagonal in the pair magnetization sectors."""


class UnsupportedModelError(SpinRingError):
    """Model configuration outside the supported family."""


class ConvergenceError(SpinRingError):
    """Iterative solver failed to reach the requested residual."""
