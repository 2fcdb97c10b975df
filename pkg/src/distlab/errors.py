"""Exception types shared across distlab modules."""


class DimensionError(ValueError):
    """Grids, vectors or families with incompatible sizes."""


class NoSeparation(ValueError):
    """The supplied sets (or subspace) do not separate the two families."""


class SingularOperatorError(ValueError):
    """A diagonal operator has a zero or negative entry."""


class SolverNotConverged(RuntimeError):
    """Hull solver stopped at its iteration cap before reaching the tolerance.

    The best feasible point found so far is attached so callers can still use
    its value as an upper bound on the hull distance.
    """

    def __init__(self, message, *, value, gap, weights0, weights1, iterations):
        super().__init__(message)
        self.value = value
        self.gap = gap
        self.weights0 = weights0
        self.weights1 = weights1
        self.iterations = iterations
