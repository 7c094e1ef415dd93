"""Exception classes shared across the library.

Every error that a solver can surface to the CLI maps to a stable exit
code (see cli.EXIT_CODES).
"""


class LatcoverError(Exception):
    """Base class for all library errors."""


class NotPositiveDefinite(LatcoverError):
    """A matrix required to be positive definite has a pivot <= 0."""


class NonCentered(LatcoverError):
    """Operation requires an origin-centered ellipsoid or body."""


class RankDeficient(LatcoverError):
    """Basis columns are linearly dependent."""


class CapExceeded(LatcoverError):
    """Enumeration produced more points than the configured cap.

    Carries the partial count seen so far; the partial result is never
    returned as a success.
    """

    def __init__(self, count, message=None):
        self.count = count
        super().__init__(message or f"enumeration cap exceeded after {count} points")


class BudgetExceeded(LatcoverError):
    """A search budget (candidates, branch nodes, recursion) ran out."""


class IterationBudgetExceeded(LatcoverError):
    """Cutting-plane / rounding loop exceeded its iteration bound."""


class LineSearchFailure(LatcoverError):
    """Hit-and-run chord search could not bracket the body boundary."""


class DegenerateCovariance(LatcoverError):
    """Empirical second-moment matrix failed the positive-definite check."""


class RestartBudgetExceeded(LatcoverError):
    """Certify loop restarted more than the configured maximum."""


class MissingAnalyticData(LatcoverError):
    """A bound check needs an analytic quantity that was not supplied."""


class OracleIncapable(LatcoverError):
    """Body oracle lacks a facility (separation, distance) the operation needs."""


class EmptySlice(LatcoverError):
    """A hyperplane slice of a body was detected to be empty."""


class SchemaError(LatcoverError):
    """Instance file does not match the JSON schema."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")
