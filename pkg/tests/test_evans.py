import numpy as np
import pytest

from dirac_spectra import evans, linops, soliton
from dirac_spectra.errors import DomainError, NoConvergence

OMEGA = 0.5


@pytest.fixture(scope="module")
def profile():
    return soliton.closed_form_profile(OMEGA, R=25.0)


def test_sample_magnitudes_at_known_and_generic_points(profile):
    at = lambda lam: evans.evans_pair(lam, profile, R=20.0, method="fixed")
    s = at(0.0)
    assert abs(s.Eminus) < 1e-12 and abs(s.Eplus) < 1e-12
    s = at(2j * OMEGA)  # embedded eigenvalue, X+ class only
    assert abs(s.Eplus) < 1e-9
    assert abs(s.Eminus) > 0.1
    s = at(0.15 + 0.8j)
    assert abs(s.Eminus) > 0.05 and abs(s.Eplus) > 0.05


def test_reported_value_is_rate_normalized_raw_determinant(profile):
    lam, R = 0.35 + 0.25j, 12.0
    s = evans.evans_pair(lam, profile, R=R, method="adaptive")
    p = linops.params_of(profile)
    br = linops.xi_branches(p, lam)
    assert s.scale == pytest.approx((br.decay_xi[0].imag + br.decay_xi[1].imag) * R,
                                    rel=1e-12)
    xa, _ = linops._direction_raw(p, lam, +1, br.decay_xi[0])
    xb, _ = linops._direction_raw(p, lam, -1, br.decay_xi[1])
    traj = evans.shoot(lam, profile, R=R, method="adaptive")
    ends = [t.value(-1) for t in traj]
    for which, (j, k) in (("Eminus", (0, 2)), ("Eplus", (1, 3))):
        raw = np.linalg.det(np.column_stack([ends[j], ends[k], xa, xb]))
        assert abs(getattr(s, which)) * np.exp(s.scale) == pytest.approx(abs(raw),
                                                                         rel=1e-7)


def test_fixed_and_adaptive_routes_agree(profile):
    lam = 0.35 + 0.25j
    sf = evans.evans_pair(lam, profile, R=20.0, method="fixed", h=0.002)
    sa = evans.evans_pair(lam, profile, R=20.0, method="adaptive")
    assert abs(sf.Eminus - sa.Eminus) < 1e-8 * abs(sa.Eminus)
    assert abs(sf.Eplus - sa.Eplus) < 1e-8 * abs(sa.Eplus)


def test_magnitudes_have_a_large_R_limit(profile):
    lam = 0.35 + 0.25j
    s15 = evans.evans_pair(lam, profile, R=15.0, method="fixed")
    s20 = evans.evans_pair(lam, profile, R=20.0, method="fixed")
    assert abs(abs(s15.Eminus) - abs(s20.Eminus)) < 1e-2 * abs(s20.Eminus)
    assert abs(abs(s15.Eplus) - abs(s20.Eplus)) < 1e-2 * abs(s20.Eplus)
    assert s20.scale == pytest.approx(s15.scale * 20.0 / 15.0, rel=1e-12)


def test_canonical_columns_have_definite_parity(profile):
    lam, R = 0.2 + 0.3j, 10.0
    fwd = evans.shoot(lam, profile, R=R, method="adaptive")
    bwd = evans.shoot(lam, profile, R=R, method="adaptive", direction=-1)
    for j, cls in ((0, "X-"), (1, "X+"), (2, "X-"), (3, "X+")):
        left = bwd[j].value(-1)
        right = evans.REFLECTIONS[cls] @ fwd[j].value(-1)
        assert np.max(np.abs(left - right)) < 1e-8 * np.linalg.norm(right)


def test_translation_mode_decays_at_lambda_zero(profile):
    # column 2 starts on (v', u', 0, 0), which is a genuine eigenfunction
    R = 10.0
    traj = evans.shoot(0.0, profile, R=R, method="adaptive")
    ends = [t.value(-1) for t in traj]
    assert np.linalg.norm(ends[1]) < 1e-4 * np.linalg.norm(ends[3])
    _, _, vp, up = profile.eval_fields(np.array([R]))
    d = np.array([vp[0], up[0], 0.0, 0.0])
    psi = ends[1] / np.linalg.norm(ends[1])
    assert abs(abs(np.vdot(psi, d / np.linalg.norm(d))) - 1.0) < 1e-6


def test_trajectory_growth_matches_asymptotic_rate(profile):
    lam = 3.0
    p = linops.params_of(profile)
    rate = max(linops.xi_branches(p, lam).decay_xi.imag)
    slopes = []
    for t in evans.shoot(lam, profile, R=12.0, method="adaptive", record=[8.0]):
        i8 = int(np.argmin(np.abs(t.x - 8.0)))
        a = np.log(np.linalg.norm(t.psi[i8])) + t.log_scale[i8]
        b = np.log(np.linalg.norm(t.psi[-1])) + t.log_scale[-1]
        slopes.append((b - a) / 4.0)
    assert max(slopes) == pytest.approx(rate, rel=0.02)


def test_scan_flags_candidate_cell_and_refines_to_eigenvalue(profile):
    scan = evans.scan_region(profile, (-0.05, 0.05), (0.95, 1.05), grid=(8, 8),
                             R=20.0)
    assert len(scan.candidates) == 1
    cand = scan.candidates[0]
    assert cand.which == "plus"
    assert abs(cand.center - 2j * OMEGA) < 0.02
    (z,) = evans.refine_candidates(profile, scan)
    assert z.converged and z.inside_cell
    assert abs(z.lam - 2j * OMEGA) < 1e-8
    assert z.evans_abs < 1e-9


def test_scan_respects_conjugation_symmetry(profile):
    scan = evans.scan_region(profile, (0.1, 0.3), (-0.2, 0.2), grid=(5, 7),
                             R=20.0)
    for E in (scan.Eminus, scan.Eplus):
        assert np.allclose(np.abs(E), np.abs(E[::-1, :]), rtol=1e-9)


def test_scan_input_validation(profile):
    with pytest.raises(DomainError):
        evans.scan_region(profile, (0.0, 0.5), (0.0, 1.0), grid=(1, 5))
    scan = evans.scan_region(profile, (0.2, 0.2), (0.0, 0.5), grid=(5, 5))
    assert scan.re.size == 0 and scan.candidates == []


def test_refine_zero_locates_simple_and_double_zeros(profile):
    start = 0.015 + 0.02j
    assert abs(evans.refine_zero(profile, start, R=20.0)) < 1e-7
    lam = evans.refine_zero(profile, 2j * OMEGA + start, R=20.0)
    assert abs(lam - 2j * OMEGA) < 1e-8


def test_refine_zero_stays_inside_trust_disk(profile):
    with pytest.raises(NoConvergence):
        evans.refine_zero(profile, 0.35 + 0.45j, R=20.0, trust=0.2)


def test_h_spectrum_scan_finds_gap_eigenvalues(profile):
    vals = evans.h_spectrum_scan("Hminus", profile)
    assert vals.shape == (2,)
    assert np.max(np.abs(vals - [-2 * OMEGA, 0.0])) < 1e-6
    vals = evans.h_spectrum_scan("Hplus", profile)
    for target in (-2 * OMEGA, 0.0):
        assert np.min(np.abs(vals - target)) < 1e-6


def test_h_spectrum_scan_validates_input(profile):
    with pytest.raises(DomainError):
        evans.h_spectrum_scan("L", profile)
    with pytest.raises(DomainError):
        evans.h_spectrum_scan("Hminus", profile, interval=(-2.0, 0.2))
