"""Solitary-wave profiles (v, u) for the stationary system

    omega v = u' + g(X) v
    omega u = -v' - g(X) u,      X = v^2 - u^2,

with v even and positive, u odd. Two constructions: the Gross-Neveu closed
form, and quadrature of the first-order equation for X (any admissible
nonlinearity). Both return a SolitonProfile carrying sampled arrays plus an
exact/dense evaluator for off-grid points, which the shooting modules use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson, solve_ivp

from .errors import DomainError, NegativeRadicand
from .model import Nonlinearity, amplitude, gross_neveu, model_params


def symmetric_grid(R: float = 20.0, h: float = 0.01) -> np.ndarray:
    """Uniform grid on [-R, R] containing 0; h is adjusted to divide R exactly."""
    n = max(1, round(R / h))
    return np.linspace(-R, R, 2 * n + 1)


@dataclass
class SolitonProfile:
    omega: float
    nl: Nonlinearity
    x: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    vprime: np.ndarray = field(repr=False)
    uprime: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)
    Y: np.ndarray = field(repr=False)
    Z: np.ndarray = field(repr=False)
    X_omega: float
    kappa: float
    mu: float
    # evaluator at arbitrary x: returns (v, u, vprime, uprime)
    eval_fields: Callable = field(repr=False)

    @property
    def R(self) -> float:
        return float(self.x[-1])

    def eval_vu(self, x):
        v, u, _, _ = self.eval_fields(x)
        return v, u

    def eval_X(self, x):
        v, u, _, _ = self.eval_fields(x)
        return v * v - u * u


def _check_grid(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 3 or not np.all(np.diff(x) > 0):
        raise DomainError("grid must be a 1D strictly increasing array")
    if not np.allclose(x, -x[::-1], atol=1e-12):
        raise DomainError("grid must be symmetric about 0")
    return x


def closed_form_profile(omega: float, grid: np.ndarray | None = None,
                        R: float = 20.0, h: float = 0.01) -> SolitonProfile:
    """Exact Gross-Neveu profile via T = sqrt(mu) tanh(kappa x).

    Uses cos 2Theta = (1-T^2)/(1+T^2), X = 2(1 - omega/cos 2Theta),
    Z = X / cos 2Theta, v = sqrt(Z/(1+T^2)) and u = T v. Derivatives are
    analytic (T' = (kappa/sqrt(mu)) (mu - T^2), X' = -4 omega Y), so residual
    checks against the stationary system are not circular.
    """
    nl = gross_neveu()
    p = model_params(nl, omega)  # raises DomainError outside (0, 1)
    x = _check_grid(grid) if grid is not None else symmetric_grid(R, h)
    kappa, mu = p.kappa, p.mu
    sqmu = np.sqrt(mu)

    def fields(xx):
        xx = np.asarray(xx, dtype=float)
        th = np.tanh(kappa * xx)
        s2 = 1.0 / np.cosh(kappa * xx) ** 2
        T = sqmu * th
        T2 = mu * (1.0 - s2)
        one = 1.0 + T2
        # stable forms: 1 - T^2 = (1-mu) + mu*sech^2 and
        # c2 - omega = mu*(1+omega)*sech^2/(1+T^2), both free of cancellation
        c2 = ((1.0 - mu) + mu * s2) / one
        X = 2.0 * mu * (1.0 + omega) * s2 / (one * c2)
        Z = X / c2
        v = np.sqrt(Z / one)
        u = T * v
        Y = v * u
        Tp = sqmu * kappa * s2
        Xp = -4.0 * omega * Y
        Zp = (1.0 - X) * Xp / omega
        vp = (Zp * one - 2.0 * Z * T * Tp) / one**2 / (2.0 * v)
        up = Tp * v + T * vp
        return v, u, vp, up

    v, u, vp, up = fields(x)
    X = v * v - u * u
    return SolitonProfile(
        omega=omega, nl=nl, x=x, v=v, u=u, vprime=vp, uprime=up,
        X=X, Y=v * u, Z=v * v + u * u,
        X_omega=2.0 * (1.0 - omega), kappa=kappa, mu=mu, eval_fields=fields,
    )


def quadrature_profile(nl: Nonlinearity, omega: float, grid: np.ndarray | None = None,
                       R: float = 20.0, h: float = 0.01) -> SolitonProfile:
    """Profile from the phase-plane quadrature X' = -2 sqrt(G(X)^2 - omega^2 X^2).

    Starts at x0 = h/2 off the maximum with the Taylor value
    X(x0) = X_omega + X''(0) x0^2/2, X''(0) = 4 omega X_omega (g(X_omega) - omega),
    and reconstructs (v, u) from Z = G(X)/omega, Y = -X'/(4 omega),
    v = sqrt((Z+X)/2), u = Y/v.
    """
    p = model_params(nl, omega)
    x = _check_grid(grid) if grid is not None else symmetric_grid(R, h)
    X_omega = amplitude(nl, omega)
    hx = float(x[1] - x[0])
    x0 = 0.5 * hx
    Xpp0 = 4.0 * omega * X_omega * (float(nl.g(X_omega)) - omega)

    def radicand(X):
        G = np.asarray(nl.G(X), dtype=float)
        r = G * G - omega * omega * X * X
        scale = np.maximum(G * G, 1e-300)
        if np.any(r < -1e-10 * scale):
            raise NegativeRadicand(f"G(X)^2 - omega^2 X^2 < 0 at X={X!r}")
        return np.maximum(r, 0.0)

    sol = solve_ivp(
        lambda _x, X: -2.0 * np.sqrt(radicand(X)),
        (x0, x[-1] + 2.0 * hx + 1e-9),
        [X_omega + 0.5 * Xpp0 * x0 * x0],
        method="RK45", rtol=1e-12, atol=1e-16, dense_output=True,
    )
    if not sol.success:
        raise NegativeRadicand(f"quadrature integration failed: {sol.message}")

    def fields(xx):
        xx = np.asarray(xx, dtype=float)
        ax = np.abs(xx)
        inner = ax <= x0
        X = np.where(inner, X_omega + 0.5 * Xpp0 * ax * ax, sol.sol(np.minimum(ax, sol.t[-1]))[0])
        Xp_abs = -2.0 * np.sqrt(radicand(X))        # dX/d|x|
        G = np.asarray(nl.G(X), dtype=float)
        g = np.asarray(nl.g(X), dtype=float)
        Z = G / omega
        Yabs = -Xp_abs / (4.0 * omega)              # Y >= 0 for x > 0
        sgn = np.sign(xx)
        Y = sgn * Yabs
        v = np.sqrt(0.5 * (Z + X))
        u = Y / v
        Xp = sgn * Xp_abs
        Zp = g * Xp / omega
        vp = (Zp + Xp) / (4.0 * v)
        Yp = omega * X - G * g / omega              # even in x
        up = (Yp - u * vp) / v
        return v, u, vp, up

    v, u, vp, up = fields(x)
    return SolitonProfile(
        omega=omega, nl=nl, x=x, v=v, u=u, vprime=vp, uprime=up,
        X=v * v - u * u, Y=v * u, Z=v * v + u * u,
        X_omega=X_omega, kappa=p.kappa, mu=p.mu, eval_fields=fields,
    )


def effective_potential(nl: Nonlinearity, omega: float, X):
    """U(X) with (X')^2/2 + U(X) = 0 along the wave: U = 2 omega^2 X^2 - 2 G(X)^2."""
    G = np.asarray(nl.G(X), dtype=float)
    return 2.0 * omega * omega * np.asarray(X, dtype=float) ** 2 - 2.0 * G * G


def stationary_residuals(profile: SolitonProfile):
    """Pointwise residuals of the stationary system and of the h-invariant.

    Returns (res_v, res_u, res_h): the first stationary equation on v, the
    second on u, and h = -(omega/2) Z + G(X)/2 which vanishes identically on
    true profiles.
    """
    g = np.asarray(profile.nl.g(profile.X), dtype=float)
    res_v = profile.omega * profile.v - (profile.uprime + g * profile.v)
    res_u = profile.omega * profile.u + profile.vprime + g * profile.u
    res_h = -0.5 * profile.omega * profile.Z + 0.5 * np.asarray(
        profile.nl.G(profile.X), dtype=float)
    return res_v, res_u, res_h


def charge(profile: SolitonProfile) -> float:
    """Integral of Z = v^2 + u^2 over the line, with exponential tail correction.

    The tail beyond R decays like e^{-2 kappa x}, so both tails together
    contribute Z(R)/kappa.
    """
    body = float(simpson(profile.Z, x=profile.x))
    return body + float(profile.Z[-1]) / profile.kappa


def fitted_decay_rate(profile: SolitonProfile, lo: float = 10.0, hi: float = 20.0) -> float:
    """Exponential rate of v from a log-linear fit on x in [lo, hi]."""
    mask = (profile.x >= lo) & (profile.x <= hi)
    if np.count_nonzero(mask) < 2:
        raise DomainError("fit window contains fewer than 2 grid points")
    slope = np.polyfit(profile.x[mask], np.log(profile.v[mask]), 1)[0]
    return float(-slope)
