"""Threshold resonances: exact phase counting against WKB estimates.

A virtual level sits at an essential-spectrum edge exactly when the
threshold ODE system has a bounded solution connecting its x -> -infinity
limit to the mirrored limit at +infinity.  The accumulated rotation of the
2-plane solution vector (the "phase") then equals an integer multiple of
pi, and tracking where the phase crosses n*pi as omega varies locates the
bifurcation points of internal modes.

Three edges are covered, named by CLI tag:

    hp-mminus   the scalar pair spectrum at +(m - omega)
    hp-mplus    the same operator at -(m + omega)
    l-implus    the linearized system at +/- i (m + omega), reduced to the
                scalar channel Gamma'' + 2 m X Gamma = 0

The exact systems for the hp tags are the operator's own first-order form
frozen at the edge eigenvalue; nothing is rederived here.  The WKB phase
integrals follow the quadratic coupling and are meaningful for the
Gross-Neveu model; negative radicands (classically forbidden stretches)
are clamped to zero phase.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import linops, odeint
from .errors import DomainError, NoCrossing

log = logging.getLogger(__name__)

TAGS = ("hp-mminus", "hp-mplus", "l-implus")


@dataclass(frozen=True)
class ThresholdSystem:
    tag: str
    A: object            # x -> (2, 2) real coefficient matrix
    init: np.ndarray     # the bounded solution's x -> -infinity limit


@dataclass(frozen=True)
class ResonancePhase:
    omega: float
    exact_phase: float
    wkb_phase: float
    n_nearest: int


@dataclass(frozen=True)
class ToyCheck:
    exact_phase: float
    wkb_phase: float
    exact_tail_coeff: float
    wkb_tail_coeff: float

    @property
    def wkb_rel_error(self) -> float:
        return abs(self.wkb_phase - self.exact_phase) / self.exact_phase


def default_extent(omega: float, m: float = 1.0) -> float:
    """Half-width R with the profile tail below the phase tolerances; the
    decay rate kappa degenerates as omega -> m, so R grows like 1/kappa."""
    kappa = math.sqrt(m * m - omega * omega)
    return max(20.0, 8.0 / kappa)


def threshold_system(tag: str, profile) -> ThresholdSystem:
    p = linops.params_of(profile)
    if tag == "hp-mminus":
        op = linops.assemble("Hplus", profile)
        lam = p.m_minus
        return ThresholdSystem(tag, lambda x: op.A(x, lam), np.array([1.0, 0.0]))
    if tag == "hp-mplus":
        op = linops.assemble("Hplus", profile)
        lam = -p.m_plus
        return ThresholdSystem(tag, lambda x: op.A(x, lam), np.array([0.0, 1.0]))
    if tag == "l-implus":
        m = 0.5 * (p.m_plus + p.m_minus)

        def A(x):
            v, u, _, _ = profile.eval_fields(np.atleast_1d(float(x)))
            X = float(v[0] * v[0] - u[0] * u[0])
            return np.array([[0.0, 1.0], [-2.0 * m * X, 0.0]])
        return ThresholdSystem(tag, A, np.array([1.0, 0.0]))
    raise DomainError(f"unknown threshold tag {tag!r}")


def exact_threshold_phase(tag: str, profile, R: float | None = None,
                          tol: float = 1e-10) -> float:
    """Total rotation of the threshold solution over [-R, R].

    The solution starts on the stated -infinity limit at x=-R; the phase is
    the unwrapped continuous argument of (psi_1, psi_2) accumulated along
    the integration, reported as |Delta theta|.  Step-by-step recording
    keeps each argument increment well under pi, so unwrapping is safe.
    """
    R = profile.R if R is None else float(R)
    if R > profile.R + 1e-12:
        raise DomainError("R exceeds the profile grid extent")
    sys = threshold_system(tag, profile)
    traj = odeint.integrate(sys.A, sys.init.astype(float), -R, R, tol=tol,
                            record_steps=True)
    theta = np.unwrap(np.arctan2(traj.psi[:, 1].real, traj.psi[:, 0].real))
    return float(abs(theta[-1] - theta[0]))


def _wkb_radicand(tag: str, profile):
    p = linops.params_of(profile)
    m = 0.5 * (p.m_plus + p.m_minus)

    def r(x):
        v, u, _, _ = profile.eval_fields(np.atleast_1d(np.asarray(x, dtype=float)))
        v2 = v * v
        if tag == "hp-mminus":
            out = (2.0 - v2) * 3.0 * v2
        elif tag == "hp-mplus":
            out = (2.0 - 3.0 * v2) * v2
        elif tag == "l-implus":
            out = 2.0 * m * (v2 - u * u)
        else:
            raise DomainError(f"unknown threshold tag {tag!r}")
        return out if np.ndim(x) else float(out[0])

    return r


def _tail_coefficient(tag: str, profile, R: float) -> float:
    # leading sqrt(radicand) ~ C e^{-kappa x} past R, integrated analytically
    v, u, _, _ = profile.eval_fields(np.array([R]))
    p = linops.params_of(profile)
    if tag == "hp-mminus":
        c = math.sqrt(6.0) * float(v[0])
    elif tag == "hp-mplus":
        c = math.sqrt(2.0) * float(v[0])
    else:
        c = math.sqrt((p.m_plus + p.m_minus) * float(v[0] ** 2 - u[0] ** 2))
    return 2.0 * c / profile.kappa


def wkb_phase(tag: str, profile, R: float | None = None) -> float:
    """The WKB integral over the real line for the tagged threshold.

    Quadrature runs on [0, R] (integrands are even), turning points split
    the range, and the monotone exponential tail beyond R is added in
    closed form.
    """
    R = profile.R if R is None else float(R)
    if R > profile.R + 1e-12:
        raise DomainError("R exceeds the profile grid extent")
    rad = _wkb_radicand(tag, profile)
    xs = np.linspace(0.0, R, 2001)
    rs = rad(xs)
    turning = []
    for k in np.nonzero(np.sign(rs[:-1]) * np.sign(rs[1:]) < 0)[0]:
        turning.append(scipy.optimize.brentq(rad, xs[k], xs[k + 1]))
    if np.any(rs < 0.0):
        clamped = np.mean(rs < 0.0)
        log.info("wkb_phase(%s, omega=%.4g): radicand clamped on %.1f%% of "
                 "[0, R]", tag, profile.omega, 100.0 * clamped)

    def f(x):
        return math.sqrt(max(rad(x), 0.0))

    total = 0.0
    for a, b in zip([0.0] + turning, turning + [R]):
        total += odeint.quad(f, a, b, tol=1e-12)
    return 2.0 * total + _tail_coefficient(tag, profile, R)


def small_amplitude_wkb_phase(omega: float, m: float = 1.0) -> float:
    """sqrt(6) integral of sqrt(X) for the tail-model amplitude
    X = 2(m - omega) e^{-2 kappa |x|}; comparison target for the
    hp-mminus WKB phase as omega -> m."""
    if not 0.0 < omega < m:
        raise DomainError("omega outside (0, m)")
    kappa = math.sqrt(m * m - omega * omega)
    amp = math.sqrt(2.0 * (m - omega))
    # truncating at 40/kappa discards a relative e^{-40}, below double eps
    val = odeint.quad(lambda x: amp * math.exp(-kappa * x), 0.0, 40.0 / kappa,
                      tol=1e-12)
    return math.sqrt(6.0) * 2.0 * val


def resonance_phase(tag: str, omega: float, R: float | None = None) -> ResonancePhase:
    """Exact and WKB phases for the Gross-Neveu wave at one omega."""
    from .soliton import closed_form_profile

    R = default_extent(omega) if R is None else float(R)
    profile = closed_form_profile(omega, R=R)
    exact = exact_threshold_phase(tag, profile, R=R)
    wkb = wkb_phase(tag, profile, R=R)
    return ResonancePhase(omega=float(omega), exact_phase=exact, wkb_phase=wkb,
                          n_nearest=round(exact / math.pi))


def resonance_crossings(tag: str, n: int, bracket, tol: float = 1e-4) -> float:
    """omega at which the exact threshold phase crosses n*pi, by bisection.

    The phase is monotone decreasing in omega for Gross-Neveu, so a sign
    check of phase - n*pi at the bracket ends decides existence.
    """
    a, b = float(bracket[0]), float(bracket[1])
    if not 0.0 < a < b < 1.0:
        raise DomainError("bracket must satisfy 0 < a < b < m")
    target = n * math.pi

    def f(w):
        return resonance_phase(tag, w).exact_phase - target

    fa, fb = f(a), f(b)
    if fa * fb > 0.0:
        raise NoCrossing(f"phase - {n}*pi has no sign change on [{a}, {b}] "
                         f"(endpoint values {fa:.3f}, {fb:.3f})")
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fa * fm <= 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def wkb_toy_check(R: float = 25.0) -> ToyCheck:
    """Self-test of the phase machinery on Z'' + (2/cosh^2 x) Z = 0, whose
    bounded solution -tanh x flips sign once (exact phase pi) while the WKB
    integral gives sqrt(2) pi; the tail coefficients quantify how loose the
    WKB amplitude is (exact 1 - 2 e^{2x} versus cos-ansatz 1 - 4 e^{2x})."""
    def A(x):
        return np.array([[0.0, 1.0], [-2.0 / math.cosh(x) ** 2, 0.0]])

    init = np.array([1.0, 0.0])
    traj = odeint.integrate(A, init, -R, R, tol=1e-10, record_steps=True)
    theta = np.unwrap(np.arctan2(traj.psi[:, 1].real, traj.psi[:, 0].real))
    exact = float(abs(theta[-1] - theta[0]))

    wkb = odeint.quad(lambda x: math.sqrt(2.0) / math.cosh(x),
                      -math.inf, math.inf, tol=1e-10)

    x_fit = -5.0  # deep enough in the tail, but well above integrator noise
    zt = odeint.integrate(A, init, -R, x_fit, tol=1e-12)
    c_exact = (1.0 - float(zt.value(-1)[0].real)) * math.exp(-2.0 * x_fit)
    sigma = odeint.quad(lambda x: math.sqrt(2.0) / math.cosh(x),
                        -math.inf, x_fit, tol=1e-12)
    c_wkb = (1.0 - math.cos(sigma)) * math.exp(-2.0 * x_fit)
    return ToyCheck(exact_phase=exact, wkb_phase=wkb,
                    exact_tail_coeff=c_exact, wkb_tail_coeff=c_wkb)
