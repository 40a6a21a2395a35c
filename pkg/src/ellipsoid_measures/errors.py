"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: validation problems exit 2, numerical
failures exit 3, resource guards exit 4.
"""


class GeometryError(Exception):
    exit_code = 1


class DomainError(GeometryError, ValueError):
    """An argument violates a documented precondition."""

    exit_code = 2


class DegeneracyError(DomainError):
    """Singular or rank-deficient input (matrix, point set)."""


class SymmetryError(DomainError):
    """A point set claimed to be centrally symmetric is not."""


class NumericalError(GeometryError, ArithmeticError):
    exit_code = 3


class ConvergenceError(NumericalError):
    """Iteration stopped before reaching its tolerance.

    ``best`` carries the last estimate so callers can still inspect it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ResourceError(GeometryError):
    """A work-budget guard tripped before any heavy computation started."""

    exit_code = 4

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
