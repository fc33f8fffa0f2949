"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class SolverFailure(RuntimeError):
    """The simplex solver exceeded its pivot budget."""


class EmptyPolytopeError(ValueError):
    """A query needs a nonempty polytope but the constraints are infeasible."""


class UnboundedPolytopeError(ValueError):
    """A query needs a bounded polytope."""


class DomainError(ValueError):
    """A bound was evaluated outside the range where it holds.

    ``interval`` is the valid ``(low, high)`` half-open range, which may be
    empty (``low >= high``).
    """

    def __init__(self, message, interval):
        super().__init__(message)
        self.interval = interval


class CapacityError(OverflowError):
    """An integer result does not fit; ``threshold`` carries the float value."""

    def __init__(self, message, threshold):
        super().__init__(message)
        self.threshold = threshold


class DegeneratePolytopeError(ValueError):
    """Rejection sampling from a polytope accepts too rarely."""


class UnsupportedDistribution(ValueError):
    """No population level-set oracle exists for this distribution."""
