"""Linearized operators about a solitary wave and their asymptotics.

Three operator kinds act on perturbations of the wave:

  Hminus = [[g - omega, d/dx], [-d/dx, -g - omega]]
  Hplus  = Hminus + 2 g'(X) [[v^2, -v u], [-v u, u^2]]
  L      = [[0, Hminus], [-Hplus, 0]]   acting on (rho, sigma) stacked

Everything the shooting code needs is the first-order form
psi' = A(x; lambda) psi with A = A0(x) + lambda*B (A0 real, B constant), the
constant-coefficient limit A_inf(lambda), and for the 4x4 case the pair of
decaying directions at +infinity built from the wavenumber branches
xi = s_outer * sqrt((omega + s_inner*i*lambda)^2 - m^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateDirection, DomainError
from .model import ModelParams, model_params
from .soliton import SolitonProfile

KINDS = ("Hminus", "Hplus", "L")

# vanishing threshold for the closed-form eigendirections; relative to 1+|lambda|
_DIRECTION_TINY = 1e-6
_REAL_ROOT_TIE = 1e-12
_RIGHT_LIMIT_NUDGE = 1e-9


@dataclass
class LinearOperatorField:
    """First-order form of (kind - lambda) psi = 0 along the profile."""

    kind: str
    profile: SolitonProfile
    dim: int
    A0: Callable = field(repr=False)   # x -> (dim, dim) real
    B: np.ndarray = field(repr=False)  # constant lambda-part

    def A(self, x, lam):
        return self.A0(x) + lam * self.B

    def A_inf(self, lam):
        p = params_of(self.profile)
        if self.dim == 2:
            return np.array([[0.0, -(p.m_plus + lam)], [-(p.m_minus - lam), 0.0]],
                            dtype=complex)
        return asymptotic_matrix(p, lam)


def params_of(profile: SolitonProfile) -> ModelParams:
    return model_params(profile.nl, profile.omega)


def assemble(kind: str, profile: SolitonProfile) -> LinearOperatorField:
    if kind not in KINDS:
        raise DomainError(f"unknown operator kind {kind!r}")
    nl = profile.nl
    omega = profile.omega

    if kind in ("Hminus", "Hplus"):
        def A0(x, _kind=kind):
            v, u, _, _ = profile.eval_fields(x)
            X = v * v - u * u
            g = float(nl.g(X))
            if _kind == "Hminus":
                return np.array([[0.0, -(g + omega)], [omega - g, 0.0]])
            gp = float(nl.gprime(X))
            return np.array([
                [-2.0 * gp * v * u, 2.0 * gp * u * u - g - omega],
                [omega - g - 2.0 * gp * v * v, 2.0 * gp * v * u],
            ])

        B = np.array([[0.0, -1.0], [1.0, 0.0]])
        return LinearOperatorField(kind=kind, profile=profile, dim=2, A0=A0, B=B)

    def A0(x):
        v, u, _, _ = profile.eval_fields(x)
        X = v * v - u * u
        g = float(nl.g(X))
        gp = float(nl.gprime(X))
        M = np.zeros((4, 4))
        M[0, 0] = -2.0 * gp * v * u
        M[0, 1] = 2.0 * gp * u * u - g - omega
        M[1, 0] = omega - g - 2.0 * gp * v * v
        M[1, 1] = 2.0 * gp * v * u
        M[2, 3] = -(g + omega)
        M[3, 2] = omega - g
        return M

    B = np.zeros((4, 4))
    B[0, 3] = 1.0
    B[1, 2] = -1.0
    B[2, 1] = -1.0
    B[3, 0] = 1.0
    return LinearOperatorField(kind="L", profile=profile, dim=4, A0=A0, B=B)


def asymptotic_matrix(p: ModelParams, lam) -> np.ndarray:
    return np.array([
        [0.0, -p.m_plus, 0.0, lam],
        [-p.m_minus, 0.0, -lam, 0.0],
        [0.0, -lam, 0.0, -p.m_plus],
        [lam, 0.0, -p.m_minus, 0.0],
    ], dtype=complex)


# ---------------------------------------------------------------------------
# known exact eigenpairs


@dataclass
class Eigenpair:
    lam: complex
    psi: np.ndarray  # (dim, n) sampled on profile.x
    parity: str


def known_eigenpairs(kind: str, profile: SolitonProfile) -> list[Eigenpair]:
    """The eigenpairs that exist in closed form for every admissible model.

    Hminus: (v,u) at 0 and (u,v) at -2 omega; Hplus: (v',u') at 0 and (u,v)
    at -2 omega; L: translation/gauge kernel plus (u,v,+-i u,+-i v) at
    lambda = -+ 2 i omega.
    """
    v, u, vp, up = profile.v, profile.u, profile.vprime, profile.uprime
    w = profile.omega
    if kind == "Hminus":
        return [Eigenpair(0.0, np.array([v, u]), "even"),
                Eigenpair(-2.0 * w, np.array([u, v]), "odd")]
    if kind == "Hplus":
        return [Eigenpair(0.0, np.array([vp, up]), "odd"),
                Eigenpair(-2.0 * w, np.array([u, v]), "odd")]
    if kind == "L":
        zero = np.zeros_like(v)
        return [
            Eigenpair(0.0, np.array([vp, up, zero, zero]), "X+"),
            Eigenpair(0.0, np.array([zero, zero, v, u]), "X-"),
            Eigenpair(-2.0j * w, np.array([u, v, 1j * u, 1j * v]), "X+"),
            Eigenpair(+2.0j * w, np.array([u, v, -1j * u, -1j * v]), "X+"),
        ]
    raise DomainError(f"unknown operator kind {kind!r}")


@dataclass(frozen=True)
class SpectrumBands:
    kind: str
    axis: str               # "real" or "imaginary"
    rays: tuple             # ((lo, hi), ...) in the axis coordinate


def continuous_spectrum(kind: str, p: ModelParams) -> SpectrumBands:
    if kind in ("Hminus", "Hplus"):
        return SpectrumBands(kind, "real",
                             ((-math.inf, -p.m_plus), (p.m_minus, math.inf)))
    if kind == "L":
        return SpectrumBands(kind, "imaginary",
                             ((-math.inf, -p.m_minus), (p.m_minus, math.inf)))
    raise DomainError(f"unknown operator kind {kind!r}")


# ---------------------------------------------------------------------------
# asymptotic wavenumbers and eigendirections (4x4 case)


def dispersion_residual(p: ModelParams, lam, xi):
    lam = complex(lam)
    xi = np.asarray(xi, dtype=complex)
    return (p.m_minus**2 + xi**2 + lam**2) * (p.m_plus**2 + xi**2 + lam**2) \
        - 4.0 * p.omega**2 * xi**2


def _mass(p: ModelParams) -> float:
    return 0.5 * (p.m_minus + p.m_plus)


def _family_root(p: ModelParams, lam: complex, s: int):
    """Principal root of (omega + s i lambda)^2 - m^2, upper lip on the cut.

    Returns (root, on_cut). IEEE signed zeros can land a real negative
    radicand on the lower lip, so that case is forced to +i sqrt(|r|)
    explicitly (the reported-label convention).
    """
    w = p.omega + s * 1j * complex(lam)
    r = w * w - _mass(p) ** 2
    if r.imag == 0.0 and r.real < 0.0:
        return 1j * math.sqrt(-r.real), True
    return complex(np.sqrt(r)), False


def _direction_raw(p: ModelParams, lam: complex, s: int, xi: complex):
    """Unnormalized null vector of (A_inf - i xi) for family s, switching
    forms near the primary form's vanishing point lambda = -s i m_minus.

    The components are polynomial in (lambda, xi), so downstream consumers
    that need analyticity in lambda can use this form directly.
    """
    lam = complex(lam)
    tiny = _DIRECTION_TINY * (1.0 + abs(lam))
    vec = np.array([1j * xi, s * 1j * lam - p.m_minus, s * xi,
                    lam + s * 1j * p.m_minus])
    if np.linalg.norm(vec) > tiny:
        return vec, False
    alt = np.array([p.m_plus + s * 1j * lam, -1j * xi, lam - s * 1j * p.m_plus,
                    -s * xi])
    if np.linalg.norm(alt) > tiny:
        return alt, True
    raise DegenerateDirection(f"both eigendirection forms vanish at lambda={lam}")


def _direction(p: ModelParams, lam: complex, s: int, xi: complex):
    vec, used_alt = _direction_raw(p, lam, s, xi)
    return vec / np.linalg.norm(vec), used_alt


def _decaying_root(p: ModelParams, lam: complex, s: int) -> complex:
    """The family-s root with Im xi > 0 (decay at +infinity); exactly real
    roots (lambda on the essential spectrum) are resolved by the right-limit
    lambda + delta, delta real positive."""
    q, _ = _family_root(p, lam, s)
    if abs(q.imag) > _REAL_ROOT_TIE * (1.0 + abs(q)):
        return q if q.imag > 0 else -q
    qn, _ = _family_root(p, complex(lam) + _RIGHT_LIMIT_NUDGE, s)
    d = qn if qn.imag > 0 else -qn
    return q if abs(q - d) <= abs(q + d) else -q


@dataclass
class XiBranches:
    lam: complex
    xi: np.ndarray        # (2, 2): [s_outer, s_inner], signs ordered (+, -)
    cut: np.ndarray       # (2,) bool per inner family: radicand hit the cut
    decay_xi: np.ndarray  # (2,) decaying root per family, order (+, -)
    decay_vec: np.ndarray = field(repr=False)  # (2, 4) unit directions
    used_alt: np.ndarray = field(repr=False)   # (2,) bool


def xi_branches(p: ModelParams, lam) -> XiBranches:
    lam = complex(lam)
    xi = np.zeros((2, 2), dtype=complex)
    cut = np.zeros(2, dtype=bool)
    decay_xi = np.zeros(2, dtype=complex)
    decay_vec = np.zeros((2, 4), dtype=complex)
    used_alt = np.zeros(2, dtype=bool)
    for col, s in enumerate((+1, -1)):
        q, on_cut = _family_root(p, lam, s)
        xi[0, col] = q
        xi[1, col] = -q
        cut[col] = on_cut
        dq = _decaying_root(p, lam, s)
        decay_xi[col] = dq
        decay_vec[col], used_alt[col] = _direction(p, lam, s, dq)
    return XiBranches(lam=lam, xi=xi, cut=cut, decay_xi=decay_xi,
                      decay_vec=decay_vec, used_alt=used_alt)


def asymptotic_eigenvectors(p: ModelParams, lam):
    """Decaying pair at +infinity: (xi values (2,), unit vectors (2, 4)).

    Raises DegenerateDirection if the two family directions coincide.
    """
    br = xi_branches(p, lam)
    sv = np.linalg.svd(br.decay_vec.T, compute_uv=False)
    if sv[-1] < 1e-12:
        raise DegenerateDirection(
            f"decaying directions coincide at lambda={complex(lam)}")
    return br.decay_xi, br.decay_vec


# ---------------------------------------------------------------------------
# finite-difference application (residual checks for eigenpairs)


def _d4(f: np.ndarray, h: float) -> np.ndarray:
    """4th-order first derivative; two boundary points on each side are junk."""
    d = np.zeros_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    return d


def fd_apply(kind: str, profile: SolitonProfile, psi: np.ndarray) -> np.ndarray:
    """Apply the operator to grid data psi (dim, n) with 4th-order stencils.

    Output is valid on the interior (trim 2 points each side).
    """
    h = float(profile.x[1] - profile.x[0])
    v, u = profile.v, profile.u
    g = np.asarray(profile.nl.g(profile.X), dtype=float)
    gp = np.asarray(profile.nl.gprime(profile.X), dtype=float)
    w = profile.omega

    def hminus(p1, p2):
        return ((g - w) * p1 + _d4(p2, h), -_d4(p1, h) - (g + w) * p2)

    def hplus(p1, p2):
        a, b = hminus(p1, p2)
        return (a + 2.0 * gp * (v * v * p1 - v * u * p2),
                b + 2.0 * gp * (-v * u * p1 + u * u * p2))

    if kind == "Hminus":
        return np.array(hminus(psi[0], psi[1]))
    if kind == "Hplus":
        return np.array(hplus(psi[0], psi[1]))
    if kind == "L":
        top = hminus(psi[2], psi[3])
        bot = hplus(psi[0], psi[1])
        return np.array([top[0], top[1], -bot[0], -bot[1]])
    raise DomainError(f"unknown operator kind {kind!r}")


def eigenpair_residual(kind: str, profile: SolitonProfile, pair: Eigenpair) -> float:
    """Sup norm of (Op - lambda) psi over the interior grid."""
    out = fd_apply(kind, profile, pair.psi) - pair.lam * pair.psi
    return float(np.max(np.abs(out[:, 2:-2])))
