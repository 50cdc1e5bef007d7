"""Linear ODE propagation with magnitude renormalization, plus 1D quadrature.

integrate() advances psi' = A(x) psi with an embedded Dormand-Prince 5(4)
pair. Solutions of the shooting problems grow like e^{kappa R} and would
overflow long before R = 20 at double precision times the determinant
algebra downstream, so the stored state is kept inside [1/S, S] in sup norm
and the stripped magnitude is accumulated as log_scale. Linearity makes this
exact: the true solution at a sample is psi * exp(log_scale).

quad() is a thin contract wrapper over QUADPACK: tolerance enforced,
semi-infinite ranges mapped onto (0, 1) by x = a - log(1 - t) first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .errors import NonConvergence, StepUnderflow

SCALE_CAP = 1e6          # allowed sup-norm band is [1/SCALE_CAP, SCALE_CAP]
MIN_STEP = 1e-14

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_ERR = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


@dataclass
class Trajectory:
    """Sampled renormalized states: true psi at sample i is psi[i]*e^{log_scale[i]}."""

    x: np.ndarray
    psi: np.ndarray = field(repr=False)
    log_scale: np.ndarray

    def value(self, i: int = -1):
        return self.psi[i] * math.exp(self.log_scale[i])


def integrate(A, psi0, x0: float, x1: float, tol: float = 1e-10,
              record=None, record_steps: bool = False,
              scale_cap: float = SCALE_CAP, min_step: float = MIN_STEP) -> Trajectory:
    """Propagate psi' = A(x) psi from x0 to x1 (either direction).

    A maps x to a (d, d) array; psi0 may be a vector or a (d, k) matrix of
    columns propagated together. Samples are taken at x0, at each point of
    `record` lying between x0 and x1, and at x1; record_steps=True stores
    every accepted step instead. Raises StepUnderflow when error control
    wants a step below min_step.
    """
    y = np.array(psi0, dtype=complex)
    x = float(x0)
    direction = 1.0 if x1 >= x0 else -1.0
    ls = 0.0
    n0 = np.max(np.abs(y))
    if n0 > 0 and (n0 > scale_cap or n0 < 1.0 / scale_cap):
        y /= n0
        ls += math.log(n0)

    targets = [float(x1)]
    if record is not None:
        inner = [float(t) for t in record
                 if (t - x0) * direction > 0 and (x1 - t) * direction > 0]
        targets = sorted(inner, key=lambda t: (t - x0) * direction) + targets

    xs, states, scales = [x], [y.copy()], [ls]
    if x1 == x0:
        return Trajectory(np.array(xs), np.array(states), np.array(scales))

    h = direction * min(1e-3, abs(x1 - x0))
    ti = 0
    k = [None] * 7
    for _ in range(10_000_000):
        remaining = targets[ti] - x
        if abs(h) > abs(remaining):
            h = remaining
        k[0] = A(x) @ y
        for i in range(1, 7):
            yi = y + h * sum(_A[i][j] * k[j] for j in range(i))
            k[i] = A(x + _C[i] * h) @ yi
        y5 = y + h * sum(_B5[i] * k[i] for i in range(7) if _B5[i] != 0.0)
        err_vec = h * sum(_ERR[i] * k[i] for i in range(7) if _ERR[i] != 0.0)
        scale = max(np.max(np.abs(y)), np.max(np.abs(y5)), 1.0)
        err = np.max(np.abs(err_vec)) / scale
        if err <= tol:
            x = x + h
            y = y5
            n = np.max(np.abs(y))
            if n > 0 and (n > scale_cap or n < 1.0 / scale_cap):
                y = y / n
                ls += math.log(n)
            hit = abs(targets[ti] - x) <= 1e-13 * max(1.0, abs(x))
            if record_steps or hit:
                xs.append(x)
                states.append(y.copy())
                scales.append(ls)
            if hit:
                ti += 1
                if ti == len(targets):
                    return Trajectory(np.array(xs), np.array(states), np.array(scales))
        factor = 0.9 * (tol / err) ** 0.2 if err > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))
        if abs(h) < min_step:
            raise StepUnderflow(f"step {abs(h):.3e} below {min_step:.1e} at x={x:.6g}")
    raise RuntimeError("integrate: step budget exhausted")  # pragma: no cover


def quad(f, a: float, b: float, tol: float = 1e-10, limit: int = 200) -> float:
    """Definite integral of a scalar callable with error <= tol.

    Infinite endpoints are mapped by the exponential substitution
    x = a - log(1-t) (and its mirror) onto t in (0, 1) before handing the
    finite integral to QUADPACK. Raises NonConvergence if the routine flags
    an error or its error estimate exceeds tol.
    """
    if math.isinf(a) and math.isinf(b):
        return quad(f, a, 0.0, tol=0.5 * tol, limit=limit) + \
            quad(f, 0.0, b, tol=0.5 * tol, limit=limit)
    if math.isinf(b):
        return quad(lambda t: f(a - math.log1p(-t)) / (1.0 - t), 0.0, 1.0,
                    tol=tol, limit=limit)
    if math.isinf(a):
        return quad(lambda t: f(b + math.log1p(-t)) / (1.0 - t), 0.0, 1.0,
                    tol=tol, limit=limit)
    out = scipy.integrate.quad(f, a, b, epsabs=tol, epsrel=tol,
                               limit=limit, full_output=1)
    result, abserr = out[0], out[1]
    if len(out) > 3:
        raise NonConvergence(f"quad on [{a}, {b}]: {out[3]}")
    if abserr > tol * max(1.0, abs(result)):
        raise NonConvergence(
            f"quad on [{a}, {b}]: error estimate {abserr:.3e} above tol {tol:.1e}")
    return result
