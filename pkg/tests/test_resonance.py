import logging
import math

import numpy as np
import pytest

from dirac_spectra import resonance, soliton
from dirac_spectra.errors import DomainError, NoCrossing

OMEGA = 0.5


@pytest.fixture(scope="module")
def profile():
    return soliton.closed_form_profile(OMEGA, R=25.0)


def test_threshold_systems_match_frozen_coefficient_matrices(profile):
    x = 0.7
    v, u, _, _ = profile.eval_fields(np.array([x]))
    v, u = float(v[0]), float(u[0])
    expected = {
        "hp-mminus": [[2 * u * v, v * v - 3 * u * u - 2],
                      [3 * v * v - u * u, -2 * u * v]],
        "hp-mplus": [[2 * u * v, v * v - 3 * u * u],
                     [3 * v * v - u * u - 2, -2 * u * v]],
        "l-implus": [[0.0, 1.0], [-2 * (v * v - u * u), 0.0]],
    }
    inits = {"hp-mminus": [1.0, 0.0], "hp-mplus": [0.0, 1.0],
             "l-implus": [1.0, 0.0]}
    for tag in resonance.TAGS:
        sys = resonance.threshold_system(tag, profile)
        assert np.max(np.abs(sys.A(x) - np.array(expected[tag]))) < 1e-12
        assert list(sys.init) == inits[tag]
    with pytest.raises(DomainError):
        resonance.threshold_system("hp-zero", profile)


def test_toy_check_frozen_values():
    toy = resonance.wkb_toy_check()
    assert abs(toy.exact_phase - math.pi) < 1e-8
    assert abs(toy.wkb_phase - math.sqrt(2.0) * math.pi) < 1e-8
    assert toy.wkb_rel_error == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-8)
    # the exact tail is 1 - 2 e^{2x}; the cos-ansatz tail is 1 - 4 e^{2x}
    assert toy.exact_tail_coeff == pytest.approx(2.0, abs=5e-4)
    assert toy.wkb_tail_coeff == pytest.approx(4.0, abs=5e-4)


def test_exact_phase_hits_known_bifurcation_anchors():
    ph = resonance.resonance_phase("hp-mminus", 0.367)
    assert abs(ph.exact_phase - 3 * math.pi) < 0.01
    assert ph.n_nearest == 3
    ph = resonance.resonance_phase("hp-mminus", 0.205)
    assert abs(ph.exact_phase - 4 * math.pi) < 0.01
    assert ph.n_nearest == 4


def test_exact_phase_approaches_two_pi_at_the_existence_edge():
    ph = resonance.resonance_phase("hp-mminus", 0.99)
    assert abs(ph.exact_phase - 2 * math.pi) < 0.01


def test_crossings_located_by_bisection():
    w3 = resonance.resonance_crossings("hp-mminus", 3, (0.25, 0.5))
    assert abs(w3 - 0.3667) < 5e-3
    w4 = resonance.resonance_crossings("hp-mminus", 4, (0.1, 0.3))
    assert abs(w4 - 0.2050) < 5e-3


def test_crossings_require_a_straddling_bracket():
    with pytest.raises(NoCrossing):
        resonance.resonance_crossings("hp-mminus", 4, (0.5, 0.9))
    with pytest.raises(DomainError):
        resonance.resonance_crossings("hp-mminus", 3, (0.25, 1.2))


def test_exact_phase_monotone_decreasing_in_omega():
    ws = np.arange(0.15, 0.96, 0.1)
    phases = [resonance.resonance_phase("hp-mminus", w).exact_phase for w in ws]
    assert np.all(np.diff(phases) < 0.0)


def test_exact_phase_R_invariant_at_a_crossing():
    # off resonance the nilpotent tail drifts the phase like 1/R; at a
    # crossing the solution stays bounded and the drift collapses
    w3 = 0.36673
    a = resonance.exact_threshold_phase(
        "hp-mminus", soliton.closed_form_profile(w3, R=20.0))
    b = resonance.exact_threshold_phase(
        "hp-mminus", soliton.closed_form_profile(w3, R=30.0))
    assert abs(a - b) < 1e-3


def test_wkb_phase_positive_and_monotone_decreasing():
    for tag in ("hp-mminus", "l-implus"):
        ws = np.arange(0.2, 0.95, 0.15)
        vals = [resonance.resonance_phase(tag, w).wkb_phase for w in ws]
        assert min(vals) > 0.0
        assert np.all(np.diff(vals) < 0.0)


def test_wkb_clamp_is_logged_for_large_amplitude(caplog):
    pr = soliton.closed_form_profile(0.3, R=20.0)
    with caplog.at_level(logging.INFO, logger="dirac_spectra.resonance"):
        resonance.wkb_phase("hp-mplus", pr)
    assert "clamped" in caplog.text
    caplog.clear()
    pr = soliton.closed_form_profile(0.9, R=20.0)
    with caplog.at_level(logging.INFO, logger="dirac_spectra.resonance"):
        resonance.wkb_phase("hp-mplus", pr)
    assert "clamped" not in caplog.text


def test_small_amplitude_model_matches_closed_form():
    for w in (0.5, 0.95):
        target = 4.0 * math.sqrt(3.0) / math.sqrt(1.0 + w)
        assert resonance.small_amplitude_wkb_phase(w) == pytest.approx(
            target, rel=1e-10)
    with pytest.raises(DomainError):
        resonance.small_amplitude_wkb_phase(1.5)


def test_model_agreement_improves_toward_small_amplitude():
    def ratio(w):
        exact = resonance.resonance_phase("hp-mminus", w).exact_phase
        return abs(resonance.small_amplitude_wkb_phase(w) - exact) / exact

    assert ratio(0.95) < ratio(0.4)


def test_edge_forms_converge_at_small_amplitude():
    # both remaining thresholds reduce to the same integral as omega -> 1
    a = resonance.resonance_phase("hp-mplus", 0.95).wkb_phase
    b = resonance.resonance_phase("l-implus", 0.95).wkb_phase
    assert abs(a - b) < 0.05 * b


def test_exact_phase_validates_extent(profile):
    with pytest.raises(DomainError):
        resonance.exact_threshold_phase("hp-mminus", profile, R=40.0)
