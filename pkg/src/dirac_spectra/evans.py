"""Evans-function shooting for the 4x4 linearization and gap spectra.

The recipe: propagate the four canonical solutions Psi_1..Psi_4 of
psi' = A(x; lambda) psi from x=0 out to x=R, then test whether a combination
from one parity class matches the two directions that decay at +infinity,

    Eminus = det[Psi_1(R), Psi_3(R), Xi_a, Xi_b]
    Eplus  = det[Psi_2(R), Psi_4(R), Xi_a, Xi_b].

Zeros in lambda are eigenvalues.  Determinants are reported with the leading
exponent (sum of the two decay rates times R) removed so that |E| has a
finite large-R limit away from the essential spectrum; the removal uses an
analytic phase factor so root-finding on E keeps superlinear convergence.

Two propagation routes are kept deliberately separate: an adaptive one built
on odeint.integrate (the reference), and a fixed-step one that assembles
one-step order-5 transfer matrices on a precomputed coefficient lattice,
vectorized over both steps and a batch of lambdas.  Scans and refinement use
the fixed route; tests hold the two against each other.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import linops, odeint
from .errors import DegenerateDirection, DomainError, NoConvergence
from .odeint import _A, _B5, _C, Trajectory

# canonical initial-data columns per parity class (even/odd component pattern)
PARITY_COLUMNS = {"X-": (0, 2), "X+": (1, 3)}
REFLECTIONS = {
    "X-": np.diag([1.0, -1.0, 1.0, -1.0]),
    "X+": np.diag([-1.0, 1.0, -1.0, 1.0]),
}

_GAP_GUARD = 1e-3
_LAM_CHUNK = 256
_STEP_BLOCK = 256


@dataclass(frozen=True)
class EvansSample:
    """Both determinants at one lambda.

    |Eminus| and |Eplus| equal the raw matching determinants divided by
    exp(scale), where scale = (Im xi_dec(+) + Im xi_dec(-)) * R is the
    exponent carried by a fully growing pair of solutions.  The normalizer
    actually applied is the complex rotor exp(i (xi_dec(+) + xi_dec(-)) R),
    which has the same modulus and keeps E analytic in lambda.  Zero sets
    are unaffected either way.
    """

    lam: complex
    R: float
    Eminus: complex
    Eplus: complex
    scale: float


@dataclass(frozen=True)
class Candidate:
    which: str      # "minus" or "plus"
    i: int          # cell index along the imaginary grid
    j: int          # cell index along the real grid
    center: complex


@dataclass
class RegionScan:
    omega: float
    R: float
    re: np.ndarray
    im: np.ndarray
    Eminus: np.ndarray = field(repr=False)   # (len(im), len(re))
    Eplus: np.ndarray = field(repr=False)
    scale: np.ndarray = field(repr=False)
    candidates: list = field(default_factory=list)

    def zero_threshold(self, which: str) -> float:
        E = self.Eminus if which == "minus" else self.Eplus
        return zero_threshold(E)


@dataclass
class RefinedZero:
    candidate: Candidate
    lam: complex | None
    evans_abs: float | None
    converged: bool
    inside_cell: bool | None


def zero_threshold(values, factor: float = 1e-6) -> float:
    """Only relative smallness is meaningful for E; 'zero' means below
    factor times the median magnitude over the sampled set."""
    a = np.abs(np.asarray(values, dtype=complex).ravel())
    return factor * float(np.median(a))


# ---------------------------------------------------------------------------
# coefficient lattice and one-step transfer matrices (fixed-step route)


def _a0_stack(profile, kind: str, xs: np.ndarray) -> np.ndarray:
    """A0 at many x at once; (len(xs), d, d) real."""
    v, u, _, _ = profile.eval_fields(xs)
    X = v * v - u * u
    g = np.asarray(profile.nl.g(X), dtype=float)
    gp = np.asarray(profile.nl.gprime(X), dtype=float)
    w = profile.omega
    n = xs.size
    if kind == "Hminus":
        M = np.zeros((n, 2, 2))
        M[:, 0, 1] = -(g + w)
        M[:, 1, 0] = w - g
        return M
    if kind == "Hplus":
        M = np.zeros((n, 2, 2))
        M[:, 0, 0] = -2.0 * gp * v * u
        M[:, 0, 1] = 2.0 * gp * u * u - g - w
        M[:, 1, 0] = w - g - 2.0 * gp * v * v
        M[:, 1, 1] = 2.0 * gp * v * u
        return M
    M = np.zeros((n, 4, 4))
    M[:, 0, 0] = -2.0 * gp * v * u
    M[:, 0, 1] = 2.0 * gp * u * u - g - w
    M[:, 1, 0] = w - g - 2.0 * gp * v * v
    M[:, 1, 1] = 2.0 * gp * v * u
    M[:, 2, 3] = -(g + w)
    M[:, 3, 2] = w - g
    return M


def _a0_lattice(profile, kind: str, R: float, h: float, sign: int = +1):
    """A0 sampled at the six stage abscissae of every step on [0, sign*R]."""
    nsteps = max(1, int(round(R / float(h))))
    heff = R / nsteps
    base = sign * heff * np.arange(nsteps)
    xs = (base[:, None] + sign * heff * _C[None, :6]).ravel()
    stack = _a0_stack(profile, kind, xs)
    d = stack.shape[-1]
    return sign * heff, stack.reshape(nsteps, 6, d, d)


def _transfer(A0blk: np.ndarray, B: np.ndarray, lams: np.ndarray, h: float):
    """One-step order-5 transfer matrices; (K, nsteps, d, d)."""
    d = A0blk.shape[-1]
    lam = lams.reshape(-1, 1, 1, 1)
    eye = np.eye(d, dtype=complex)
    ks = []
    for i in range(6):
        Ai = A0blk[None, :, i] + lam * B
        if i == 0:
            Y = eye
        else:
            acc = _A[i][0] * ks[0]
            for j in range(1, i):
                acc = acc + _A[i][j] * ks[j]
            Y = eye + h * acc
        ks.append(Ai @ Y)
    S = _B5[0] * ks[0]
    for i in range(2, 6):
        S = S + _B5[i] * ks[i]
    return eye + h * S


def _reduce_product(S: np.ndarray) -> np.ndarray:
    """Ordered product S[:, n-1] @ ... @ S[:, 0] by pairwise halving."""
    while S.shape[1] > 1:
        n = S.shape[1]
        P = S[:, 1 : n - n % 2 : 2] @ S[:, 0 : n - n % 2 : 2]
        if n % 2:
            P = np.concatenate([P, S[:, -1:]], axis=1)
        S = P
    return S[:, 0]


class _FixedEvaluator:
    """Reusable fixed-step propagator for one (profile, kind, R, h)."""

    def __init__(self, profile, kind: str, R: float, h: float, sign: int = +1):
        self.profile = profile
        self.kind = kind
        self.R = float(R)
        self.p = linops.params_of(profile)
        self.B = linops.assemble(kind, profile).B.astype(complex)
        self.heff, self.A0 = _a0_lattice(profile, kind, self.R, h, sign)

    def propagate(self, lams) -> tuple[np.ndarray, np.ndarray]:
        """Full transfer matrices at x = R for each lambda.

        Returns (P, logs): the true matrix is P * exp(logs), P kept at unit
        sup-norm per lambda.
        """
        lams = np.asarray(lams, dtype=complex).ravel()
        d = self.B.shape[0]
        n = self.A0.shape[0]
        out = np.empty((lams.size, d, d), dtype=complex)
        logs = np.empty(lams.size)
        for c0 in range(0, lams.size, _LAM_CHUNK):
            ch = lams[c0 : c0 + _LAM_CHUNK]
            P = np.broadcast_to(np.eye(d, dtype=complex), (ch.size, d, d)).copy()
            lg = np.zeros(ch.size)
            for s0 in range(0, n, _STEP_BLOCK):
                S = _transfer(self.A0[s0 : s0 + _STEP_BLOCK], self.B, ch, self.heff)
                P = _reduce_product(S) @ P
                m = np.max(np.abs(P), axis=(1, 2))
                P /= m[:, None, None]
                lg += np.log(m)
            out[c0 : c0 + _LAM_CHUNK] = P
            logs[c0 : c0 + _LAM_CHUNK] = lg
        return out, logs

    def samples(self, lams) -> list[EvansSample]:
        lams = np.asarray(lams, dtype=complex).ravel()
        Psi, logs = self.propagate(lams)
        out = []
        for k, lam in enumerate(lams):
            out.append(_pair_from_columns(
                complex(lam), self.p, self.R,
                [Psi[k, :, j] for j in range(4)], [logs[k]] * 4))
        return out

    def sample(self, lam) -> EvansSample:
        return self.samples([lam])[0]

    def h_indicator(self, lams, column: int) -> np.ndarray:
        """Coefficient of the growing mode at x=R, per real lambda in the
        gap, for the solution launched from the canonical column."""
        lams = np.asarray(lams, dtype=float)
        Psi, _ = self.propagate(lams)
        psi = Psi[:, :, column]
        a = self.p.m_plus + lams
        mu = np.sqrt(a * (self.p.m_minus - lams))
        c_grow = 0.5 * (psi[:, 0].real / a - psi[:, 1].real / mu)
        return c_grow / np.linalg.norm(psi, axis=1)


def _pair_from_columns(lam, p, R, cols, logs) -> EvansSample:
    dxi, _ = linops.asymptotic_eigenvectors(p, lam)  # validates non-degeneracy
    xa, _ = linops._direction_raw(p, lam, +1, dxi[0])
    xb, _ = linops._direction_raw(p, lam, -1, dxi[1])
    scale = (dxi[0].imag + dxi[1].imag) * R
    unit, lognorm = [], []
    for c, s in zip(cols, logs):
        nc = float(np.linalg.norm(c))
        unit.append(c / nc)
        lognorm.append(s + math.log(nc))
    # exp(i (xi_a + xi_b) R) removes the growing exponent exp(scale) while
    # staying analytic in lambda; real normalizers like exp(-scale) or the
    # direction norms would leave |E| intact but break the superlinear
    # root-finding that refine_zero builds on top of these values.
    rotor = 1j * (dxi[0] + dxi[1]) * R
    def det(j, k):
        mat = np.column_stack([unit[j], unit[k], xa, xb])
        return complex(np.linalg.det(mat)) * cmath.exp(lognorm[j] + lognorm[k] + rotor)
    return EvansSample(lam=complex(lam), R=R, Eminus=det(0, 2), Eplus=det(1, 3),
                       scale=scale)


# ---------------------------------------------------------------------------
# public operations


def shoot(lam, profile, R: float | None = None, method: str = "adaptive",
          h: float = 0.002, tol: float = 1e-10, direction: int = +1,
          record=None) -> list[Trajectory]:
    """The four solutions from canonical data e_1..e_4 at x=0.

    Columns 1 and 3 stay in the even-odd-even-odd class, 2 and 4 in the
    opposite one; parity substitutes for shooting toward -infinity.
    """
    R = profile.R if R is None else float(R)
    if R > profile.R + 1e-12:
        raise DomainError("R exceeds the profile grid extent")
    lam = complex(lam)
    if method == "adaptive":
        fld = linops.assemble("L", profile)
        out = []
        for j in range(4):
            e = np.zeros(4, dtype=complex)
            e[j] = 1.0
            out.append(odeint.integrate(lambda x: fld.A(x, lam), e, 0.0,
                                        direction * R, tol=tol, record=record))
        return out
    if method != "fixed":
        raise DomainError(f"unknown method {method!r}")
    ev = _FixedEvaluator(profile, "L", R, h, sign=direction)
    P, logs = ev.propagate([lam])
    out = []
    for j in range(4):
        e = np.zeros(4, dtype=complex)
        e[j] = 1.0
        col = P[0, :, j]
        n = float(np.linalg.norm(col))
        out.append(Trajectory(np.array([0.0, direction * R]),
                              np.array([e, col / n]),
                              np.array([0.0, logs[0] + math.log(n)])))
    return out


def evans_pair(lam, profile, R: float = 20.0, method: str = "adaptive",
               h: float = 0.002, tol: float = 1e-10) -> EvansSample:
    """Normalized determinant pair (Eminus, Eplus) at one lambda."""
    lam = complex(lam)
    if method == "fixed":
        return _FixedEvaluator(profile, "L", R, h).sample(lam)
    trajs = shoot(lam, profile, R, method=method, tol=tol, h=h)
    cols = [t.psi[-1] for t in trajs]
    logs = [t.log_scale[-1] for t in trajs]
    return _pair_from_columns(lam, linops.params_of(profile), R, cols, logs)


def _cell_sign_changes(F: np.ndarray) -> np.ndarray:
    corners = (F[:-1, :-1], F[:-1, 1:], F[1:, :-1], F[1:, 1:])
    mx = np.maximum.reduce(corners)
    mn = np.minimum.reduce(corners)
    return (mn < 0.0) & (mx > 0.0)


def _collect_candidates(re, im, E, which) -> list[Candidate]:
    hit = _cell_sign_changes(E.real) & _cell_sign_changes(E.imag)
    out = []
    for i, j in zip(*np.nonzero(hit)):
        center = complex(0.5 * (re[j] + re[j + 1]), 0.5 * (im[i] + im[i + 1]))
        out.append(Candidate(which, int(i), int(j), center))
    return out


def scan_region(profile, re_range, im_range, grid=(41, 59), R: float = 20.0,
                h: float = 0.01) -> RegionScan:
    """Evaluate E+- on a rectangle grid; a cell is a zero candidate when both
    the real and imaginary parts of the same determinant change sign over it."""
    n, m = int(grid[0]), int(grid[1])
    if n < 2 or m < 2:
        raise DomainError("scan grid must be at least 2x2")
    a, b = float(re_range[0]), float(re_range[1])
    c, d = float(im_range[0]), float(im_range[1])
    if a == b or c == d:
        empty = np.zeros((0, 0), dtype=complex)
        return RegionScan(profile.omega, R, np.zeros(0), np.zeros(0),
                          empty, empty.copy(), np.zeros((0, 0)), [])
    re = np.linspace(a, b, n)
    im = np.linspace(c, d, m)
    lams = re[None, :] + 1j * im[:, None]
    ss = _FixedEvaluator(profile, "L", R, h).samples(lams.ravel())
    Em = np.array([s.Eminus for s in ss]).reshape(m, n)
    Ep = np.array([s.Eplus for s in ss]).reshape(m, n)
    sc = np.array([s.scale for s in ss]).reshape(m, n)
    cands = _collect_candidates(re, im, Em, "minus") \
        + _collect_candidates(re, im, Ep, "plus")
    return RegionScan(profile.omega, R, re, im, Em, Ep, sc, cands)


def _muller_step(z0, f0, z1, f1, z2, f2):
    h1, h2 = z1 - z0, z2 - z1
    if h1 == 0 or h2 == 0:
        return None
    d1 = (f1 - f0) / h1
    d2 = (f2 - f1) / h2
    a = (d2 - d1) / (h2 + h1)
    b = a * h2 + d2
    disc = np.sqrt(complex(b * b - 4.0 * f2 * a))
    den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
    if den == 0:
        return None
    return -2.0 * f2 / den


def refine_zero(profile, lam0, R: float = 20.0, h: float = 0.002,
                max_iter: int = 100, value_tol: float = 1e-10,
                step_tol: float = 1e-12, trust: float = 0.5,
                evaluator: _FixedEvaluator | None = None,
                polish_d: float = 3e-4, polish_h: float = 0.001) -> complex:
    """Drive the smaller of |Eminus|, |Eplus| at lam0 to a zero by complex
    secant steps with a Muller fallback; the iteration is confined to a
    trust disk around the start.

    A zero of multiplicity two (the origin carries a Jordan block per parity
    class) flattens E below value_tol while lambda is still ~sqrt(value_tol)
    off; when the loop halts on the value test with a coarse last step, a
    local quadratic fit supplies the vertex.
    """
    ev = evaluator or _FixedEvaluator(profile, "L", R, h)
    s0 = ev.sample(lam0)
    which = "Eminus" if abs(s0.Eminus) <= abs(s0.Eplus) else "Eplus"

    def f(z):
        return getattr(ev.sample(z), which)

    z0 = complex(lam0)
    pts = [(z0, getattr(s0, which))]
    z1 = z0 + 1e-4 * (1.0 + abs(z0))
    pts.append((z1, f(z1)))
    z_raw = None
    for _ in range(max_iter):
        (za, fa), (zb, fb) = pts[-2], pts[-1]
        if abs(fb) < value_tol:
            z_raw = zb
            break
        step = None
        if fb != fa:
            step = -fb * (zb - za) / (fb - fa)
        if (step is None or abs(step) > 0.5 * trust) and len(pts) >= 3:
            step = _muller_step(pts[-3][0], pts[-3][1], za, fa, zb, fb)
        if step is None:
            raise NoConvergence(f"degenerate Evans secant at {zb}")
        zc = zb + step
        if abs(zc - z0) > trust:
            raise NoConvergence(f"iteration left the trust disk around {z0}")
        if abs(step) < step_tol * (1.0 + abs(zb)):
            return zc
        pts.append((zc, f(zc)))
    if z_raw is None:
        raise NoConvergence(f"no Evans zero located near {z0}")
    last_step = abs(pts[-1][0] - pts[-2][0])
    if last_step <= 3e-6 or polish_d <= 0.0:
        return z_raw
    return _polish_flat_zero(profile, z_raw, which, R, polish_d, polish_h, ev)


def _polish_flat_zero(profile, z_raw, which, R, d, h, loop_ev) -> complex:
    """Quadratic least-squares fit of E on a 5-point stencil around z_raw;
    returns the vertex for a double-zero shape, the nearest root otherwise.

    Near the imaginary axis the stencil is kept one-sided and collinear
    (real direction only): E lives on the closed right half-plane there,
    and three or more collinear samples already pin a complex quadratic,
    so no point has to sit on the essential-spectrum cut.
    """
    pev = _FixedEvaluator(profile, "L", R, h) if h < 0.95 * abs(loop_ev.heff) \
        else loop_ev
    if abs(z_raw.real) < 2.0 * d:
        s = 1.0 if z_raw.real >= 0.0 else -1.0
        deltas = s * d * np.arange(5.0, dtype=complex)
    else:
        deltas = np.array([0.0, d, -d, 1j * d, -1j * d], dtype=complex)
    vals = np.array([getattr(pev.sample(z_raw + t), which) for t in deltas])
    M = np.stack([np.ones(5, dtype=complex), deltas, deltas ** 2], axis=1)
    c0, c1, c2 = np.linalg.lstsq(M, vals, rcond=None)[0]
    if abs(c2) * d < 1e-6 * abs(c1):
        roots = [-c0 / c1]
    else:
        disc = np.sqrt(c1 * c1 - 4.0 * c2 * c0)
        q = -0.5 * (c1 + disc) if abs(c1 + disc) >= abs(c1 - disc) \
            else -0.5 * (c1 - disc)
        if q == 0:
            roots = [0.0 + 0.0j]
        else:
            roots = [q / c2, c0 / q]
            if abs(roots[0] - roots[1]) < 5.0 * d:
                roots = [-c1 / (2.0 * c2)]
    return z_raw + min(roots, key=abs)


def refine_candidates(profile, scan: RegionScan, h: float = 0.002,
                      max_iter: int = 100) -> list[RefinedZero]:
    """Run refine_zero from every candidate cell center of a scan."""
    out = []
    ev = _FixedEvaluator(profile, "L", scan.R, h)
    for c in scan.candidates:
        try:
            lam = refine_zero(profile, c.center, R=scan.R, h=h,
                              max_iter=max_iter, evaluator=ev)
        except (NoConvergence, DegenerateDirection):
            out.append(RefinedZero(c, None, None, False, None))
            continue
        s = ev.sample(lam)
        dre = scan.re[c.j + 1] - scan.re[c.j]
        dim = scan.im[c.i + 1] - scan.im[c.i]
        inside = bool(
            scan.re[c.j] - dre <= lam.real <= scan.re[c.j + 1] + dre
            and scan.im[c.i] - dim <= lam.imag <= scan.im[c.i + 1] + dim)
        out.append(RefinedZero(c, complex(lam),
                               float(min(abs(s.Eminus), abs(s.Eplus))),
                               True, inside))
    return out


# ---------------------------------------------------------------------------
# real-axis shooting for the 2x2 operators


def h_spectrum_scan(kind: str, profile, interval=None, step: float = 0.01,
                    guard: float = _GAP_GUARD, R: float | None = None,
                    h: float = 0.01) -> np.ndarray:
    """Real eigenvalues of a 2x2 operator inside its spectral gap.

    Shoots from x=0 with even data (1,0) and odd data (0,1) separately; the
    indicator is the growing-mode coefficient at x=R, whose sign changes are
    sharpened by bisection.
    """
    if kind not in ("Hminus", "Hplus"):
        raise DomainError(f"kind {kind!r} has no gap scan")
    p = linops.params_of(profile)
    lo_gap, hi_gap = -p.m_plus + guard, p.m_minus - guard
    if interval is None:
        lo, hi = lo_gap, hi_gap
    else:
        lo, hi = float(interval[0]), float(interval[1])
        if lo <= -p.m_plus or hi >= p.m_minus or lo >= hi:
            raise DomainError("interval is not inside the spectral gap")
    ev = _FixedEvaluator(profile, kind, profile.R if R is None else R, h)
    npts = max(2, int(math.ceil((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, npts)
    roots = []
    for column in (0, 1):
        ind = ev.h_indicator(grid, column)
        for k in np.nonzero(ind[:-1] * ind[1:] < 0.0)[0]:
            a, b = grid[k], grid[k + 1]
            fa = ind[k]
            for _ in range(60):
                mid = 0.5 * (a + b)
                fm = float(ev.h_indicator(np.array([mid]), column)[0])
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
                if b - a < 1e-11 * (1.0 + abs(mid)):
                    break
            roots.append(0.5 * (a + b))
    return np.array(sorted(roots))
