"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for all heisgeo errors."""


class DimensionMismatchError(GeometryError, ValueError):
    """Operands live on Heisenberg groups of different dimension."""


class DegenerateMetricError(GeometryError, ArithmeticError):
    """A metric matrix turned out to be (numerically) singular.

    The two supported metrics are nondegenerate everywhere, so this
    signals an implementation bug rather than a bad input.
    """


class RangeExceededError(GeometryError, OverflowError):
    """A closed-form geodesic was requested outside the double-precision envelope.

    Geodesics exist for all parameter values, but their coordinates grow like
    exp(|alpha * t|) (and the z coordinate like exp(2 |alpha * t|)), which
    overflows IEEE doubles. Rather than returning infinities the evaluator
    raises this error with the offending ``alpha * t``.
    """

    def __init__(self, alpha_t: float, limit: float):
        self.alpha_t = alpha_t
        self.limit = limit
        super().__init__(
            f"|alpha * t| = {abs(alpha_t):.6g} exceeds the evaluable range "
            f"(limit {limit:g}); coordinates would overflow double precision"
        )


class NonFiniteStateError(GeometryError, ArithmeticError):
    """Numerical integration produced a non-finite state."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"non-finite state encountered at t = {t!r}")
