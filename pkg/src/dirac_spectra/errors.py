"""Shared exception types.

Everything raised on purpose by this package derives from DiracSpectraError,
so CLI code can map "expected" failures to exit code 1 without catching
programming errors by accident.
"""

from __future__ import annotations


class DiracSpectraError(Exception):
    pass


class DomainError(DiracSpectraError):
    """Parameter outside the model's validity range, e.g. omega outside (0, m)."""


class NoSolitaryWave(DiracSpectraError):
    """omega*X = G(X) has no positive root below the search bound."""


class NegativeRadicand(DiracSpectraError):
    """Quadrature construction left the classically allowed region."""


class StepUnderflow(DiracSpectraError):
    """Adaptive integrator needs a step below the hard floor (1e-14)."""


class NonConvergence(DiracSpectraError):
    """Quadrature failed to reach the requested tolerance."""


class NoConvergence(DiracSpectraError):
    """Root refinement ran out of iterations or left its trust region."""


class NoCrossing(DiracSpectraError):
    """Bisection bracket does not straddle the requested phase level."""


class DegenerateDirection(DiracSpectraError):
    """Asymptotic decaying directions could not be separated."""
