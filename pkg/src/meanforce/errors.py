"""Exception types shared across the package."""

from __future__ import annotations


class MeanForceError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MeanForceError, ValueError):
    """Invalid input: broken invariant, out-of-domain argument, bad config."""


class UnsupportedOperationError(MeanForceError, TypeError):
    """Operation not defined for this input variant."""


class NumericsError(MeanForceError, ArithmeticError):
    """Numerical failure: overflow, divergence, non-convergence."""


class QuadratureError(NumericsError):
    """Quadrature did not converge. Carries the best available estimate."""

    def __init__(self, message: str, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate
