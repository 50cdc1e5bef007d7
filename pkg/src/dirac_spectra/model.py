"""Scalar self-interaction models for the 1D nonlinear Dirac equation.

A model is the nonlinearity G (with g = G', so the linear mass is m = g(0))
plus the frequency omega of the standing wave. Derived constants that every
other module needs (gap edges m -+ omega, decay rate kappa, tail shape ratio
mu) live in ModelParams.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NoSolitaryWave

AMPLITUDE_BRACKET_FLOOR = 1e-12
FIRST_ROOT_CHECK_POINTS = 1000


@dataclass(frozen=True)
class Nonlinearity:
    """Self-interaction G(X), its derivative g = G' and g' = G''; m = g(0) > 0."""

    G: Callable
    g: Callable
    gprime: Callable
    m: float
    name: str = "custom"
    coeffs: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ModelParams:
    omega: float
    m_minus: float
    m_plus: float
    kappa: float
    mu: float


def gross_neveu() -> Nonlinearity:
    """G(X) = X - X^2/2, so g(X) = 1 - X and m = 1."""
    return Nonlinearity(
        G=lambda X: X - 0.5 * X * X,
        g=lambda X: 1.0 - X,
        gprime=lambda X: -1.0 + 0.0 * X,
        m=1.0,
        name="gross-neveu",
        coeffs=(1.0, -0.5),
    )


def polynomial(coeffs) -> Nonlinearity:
    """Nonlinearity with G(X) = sum_k c_k X^k, k >= 1 (no constant term).

    coeffs lists (c_1, c_2, ...). Requires m = c_1 > 0.
    """
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs or coeffs[0] <= 0.0:
        raise DomainError("polynomial nonlinearity needs leading coefficient m > 0")
    P = np.polynomial.Polynomial((0.0,) + coeffs)
    dP = P.deriv()
    ddP = dP.deriv()
    return Nonlinearity(G=P, g=dP, gprime=ddP, m=coeffs[0], name="polynomial", coeffs=coeffs)


def model_params(nl: Nonlinearity, omega: float) -> ModelParams:
    if not 0.0 < omega < nl.m:
        raise DomainError("omega outside (0, m)")
    m_minus = nl.m - omega
    m_plus = nl.m + omega
    kappa = float(np.sqrt(m_minus * m_plus))
    mu = m_minus / m_plus
    return ModelParams(omega=omega, m_minus=m_minus, m_plus=m_plus, kappa=kappa, mu=mu)


def _bisect_root(f, lo: float, hi: float, rtol: float = 1e-15) -> float:
    # f(lo) < 0 <= f(hi); plain bisection, ~60 iterations to double precision
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * max(1.0, mid):
            break
        fm = f(mid)
        if fm < 0.0:
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def amplitude(nl: Nonlinearity, omega: float, X_max: float | None = None) -> float:
    """Smallest X > 0 with omega*X = G(X): the squared-field amplitude at x=0.

    Gross-Neveu has the closed form 2(1 - omega). Otherwise the first
    up-crossing of f(X) = omega*X - G(X) is bracketed by doubling from
    AMPLITUDE_BRACKET_FLOOR, bisected, and then verified to really be the
    first one (omega*X < G(X) strictly on (0, X_omega), sampled at
    FIRST_ROOT_CHECK_POINTS interior points, re-bracketing on any violation).
    """
    if not 0.0 < omega < nl.m:
        raise DomainError("omega outside (0, m)")
    if nl.name == "gross-neveu":
        return 2.0 * (1.0 - omega)

    def f(X):
        return omega * X - float(nl.G(X))

    hi = None
    if X_max is not None:
        if f(X_max) > 0.0:
            hi = float(X_max)
    else:
        X = 1e-6
        while X < 1e9:
            if f(X) > 0.0:
                hi = X
                break
            X *= 2.0
    if hi is None:
        raise NoSolitaryWave(f"omega*X - G(X) found no sign change (omega={omega})")

    root = _bisect_root(f, AMPLITUDE_BRACKET_FLOOR, hi)
    for _ in range(8):
        Xs = np.linspace(0.0, root, FIRST_ROOT_CHECK_POINTS + 2)[1:-1]
        bad = np.nonzero(omega * Xs - np.asarray(nl.G(Xs), dtype=float) >= 0.0)[0]
        if bad.size == 0:
            return root
        # crossed earlier than the root we found: tighten onto the first violation
        j = bad[0]
        lo = AMPLITUDE_BRACKET_FLOOR if j == 0 else Xs[j - 1]
        root = _bisect_root(f, lo, Xs[j])
    raise NoSolitaryWave("could not isolate the first root of omega*X = G(X)")
