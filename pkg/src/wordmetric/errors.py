"""Exception types raised by :mod:`wordmetric`."""


class WordMetricError(Exception):
    """Base class for all package errors."""


class InvalidGenerators(WordMetricError, ValueError):
    """The generating set violates one of its invariants."""


class ZeroGenerator(InvalidGenerators):
    pass


class NotSymmetric(InvalidGenerators):
    pass


class NotFullRank(InvalidGenerators):
    pass


class NotGenerating(InvalidGenerators):
    """Full rank, but the generators span a proper sublattice of Z^d."""


class DimensionMismatch(WordMetricError, ValueError):
    pass


class DimensionUnsupported(WordMetricError, ValueError):
    pass


class ZeroVector(WordMetricError, ValueError):
    pass


class FitMismatch(WordMetricError):
    """Ehrhart interpolation failed to predict an enumerated count."""


class CapacityExceeded(WordMetricError):
    """The requested ball would not fit in the configured point budget."""

    def __init__(self, requested, largest_feasible, budget):
        self.requested = requested
        self.largest_feasible = largest_feasible
        self.budget = budget
        super().__init__(
            f"radius {requested} exceeds the budget of {budget} stored points; "
            f"largest feasible radius is {largest_feasible}"
        )


class EmptySphere(WordMetricError):
    pass


class DegenerateWindow(WordMetricError, ValueError):
    pass


class NotHomogeneous(WordMetricError, ValueError):
    pass
