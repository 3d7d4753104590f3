"""Exception hierarchy shared by all rndiff modules."""


class RNDiffError(Exception):
    """Base class for every error raised by this package."""


class InvalidSet(RNDiffError, ValueError):
    """An interval set is not in canonical form."""


class NonTriadicEndpoint(RNDiffError, ValueError):
    """Exact mass requested where a Cantor component cannot be evaluated exactly."""


class InvalidMeasure(RNDiffError, ValueError):
    """A measure specification violates its invariants."""


class SpecError(InvalidMeasure):
    """A JSON measure document is malformed.

    ``path`` is a JSONPath-like string naming the offending node,
    e.g. ``$.sum[1].density.coeffs[0][2]``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class InvalidPartition(RNDiffError, ValueError):
    """Cells overlap, leave a gap, or are empty."""


class PointNotInterior(RNDiffError, ValueError):
    """Split point is not strictly inside the chosen cell."""


class NotARefinement(RNDiffError, ValueError):
    """A function's partition does not refine the requested coarse partition."""


class BaseDominationViolated(RNDiffError, ValueError):
    """Some cell has nu(A) > gamma(A)."""


class ConfigError(RNDiffError, ValueError):
    """Engine or decomposition configuration is invalid."""


class TraceError(RNDiffError):
    """A refinement trace is malformed or fails verification."""


class MonotonicityViolation(TraceError):
    """The functional decreased between rounds, or a strict-Jensen bound failed."""


class IterationBudgetExceeded(RNDiffError, RuntimeError):
    """Frank-Wolfe did not reach the requested duality gap."""


class DomainError(RNDiffError, ValueError):
    """Argument outside the domain of a scalar map."""
