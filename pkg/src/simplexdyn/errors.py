"""Exception types shared across the package."""


class SimplexDynError(ValueError):
    """Base class for all domain errors raised by this package."""


class NonPositiveEntry(SimplexDynError):
    """A composition entry is zero, negative, or non-finite."""


class BoundaryProximity(SimplexDynError):
    """An entry is too close to the simplex boundary for log-based operations."""


class DimensionMismatch(SimplexDynError):
    """Operands have incompatible dimensions."""


class BadDimension(SimplexDynError):
    """A dimension argument is out of the supported range."""


class LambdaZero(SimplexDynError):
    """Operation requires a strictly positive diagonal-shift coefficient."""


class LambdaNonzero(SimplexDynError):
    """Operation requires a zero diagonal-shift coefficient."""


class NotNash(SimplexDynError):
    """The supplied point fails the Nash equilibrium precondition."""


class TooLarge(SimplexDynError):
    """Problem size exceeds the supported brute-force range."""


class WrongDimension(SimplexDynError):
    """Operation is only defined for a specific number of types."""


class StepTooLarge(SimplexDynError):
    """An integrator stage moved by an implausible amount (misconfiguration)."""


class StepVsCorrelation(SimplexDynError):
    """Time step does not resolve the noise correlation time."""


class WalkTooShort(SimplexDynError):
    """A random walk has too few steps for the requested rescaling."""


class NonpositiveTime(SimplexDynError):
    """Time argument must be strictly positive."""


class TooFewSamples(SimplexDynError):
    """Not enough samples for the requested statistic."""


class GridMismatch(SimplexDynError):
    """Two trajectories do not share a time grid."""


class EmptySamples(SimplexDynError):
    """Sample arrays must be nonempty."""


class SizeMismatch(SimplexDynError):
    """Arrays must have equal length."""


class NonMonotone(SimplexDynError):
    """Quantile values must be strictly increasing."""


class NoConvergence(SimplexDynError):
    """Iterative solver failed to reach the requested tolerance."""
