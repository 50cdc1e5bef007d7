import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_spectra import model
from dirac_spectra.errors import DomainError, NoSolitaryWave


def test_gross_neveu_basics():
    nl = model.gross_neveu()
    assert nl.m == 1.0
    assert nl.G(2.0) == 0.0
    assert nl.g(0.0) == 1.0
    assert nl.gprime(17.3) == -1.0
    X = np.linspace(0.0, 2.0, 11)
    assert np.allclose(nl.G(X), X - 0.5 * X**2)


def test_model_params_exact_values():
    # omega = 0.6: kappa = sqrt(0.4*1.6) = 0.8 exactly, mu = 0.25
    p = model.model_params(model.gross_neveu(), 0.6)
    assert p.m_minus == pytest.approx(0.4, abs=1e-15)
    assert p.m_plus == pytest.approx(1.6, abs=1e-15)
    assert p.kappa == pytest.approx(0.8, abs=1e-15)
    assert p.mu == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("omega", [1.5, 0.0, -0.2, 1.0])
def test_omega_outside_range_rejected(omega):
    with pytest.raises(DomainError, match="omega outside"):
        model.model_params(model.gross_neveu(), omega)
    with pytest.raises(DomainError):
        model.amplitude(model.gross_neveu(), omega)


def test_amplitude_gross_neveu_closed_form():
    nl = model.gross_neveu()
    assert model.amplitude(nl, 0.5) == 1.0
    assert model.amplitude(nl, 0.9) == pytest.approx(0.2, abs=1e-15)


def test_amplitude_bisection_matches_closed_form():
    # same G as Gross-Neveu but through the generic bracketing path
    nl = model.polynomial([1.0, -0.5])
    assert nl.m == 1.0
    for omega in (0.1, 0.5, 0.9):
        assert model.amplitude(nl, omega) == pytest.approx(2 * (1 - omega), abs=1e-10)


def test_amplitude_cubic_oracle():
    # G = X - 0.6 X^2 + 0.05 X^3; first root of omega X = G(X) at omega=0.5
    # solves 0.05 X^2 - 0.6 X + 0.5 = 0, i.e. X = (0.6 - sqrt(0.26))/0.1
    nl = model.polynomial([1.0, -0.6, 0.05])
    expected = (0.6 - math.sqrt(0.26)) / 0.1
    assert model.amplitude(nl, 0.5) == pytest.approx(expected, abs=1e-10)


def test_amplitude_finds_first_root_not_a_later_one():
    # omega X - G(X) = X(X-0.11)(X-0.13)(X-0.9) at omega=0.1: doubling lands
    # past the narrow (0.11, 0.13) window and bisection first converges to 0.9;
    # the interior-point verification must pull the result back to 0.11.
    P = np.polynomial.Polynomial
    f = P([0.0, 1.0]) * P([-0.11, 1.0]) * P([-0.13, 1.0]) * P([-0.9, 1.0])
    G = P([0.0, 0.1]) - f
    nl = model.polynomial(G.coef[1:])
    assert nl.m == pytest.approx(0.1 + 0.11 * 0.13 * 0.9, abs=1e-15)
    assert model.amplitude(nl, 0.1) == pytest.approx(0.11, abs=1e-9)


def test_no_solitary_wave():
    nl = model.polynomial([1.0, 1.0])  # G = X + X^2 stays above omega X
    with pytest.raises(NoSolitaryWave):
        model.amplitude(nl, 0.5)


def test_polynomial_rejects_nonpositive_mass():
    with pytest.raises(DomainError):
        model.polynomial([-1.0, 0.5])
    with pytest.raises(DomainError):
        model.polynomial([])


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.99))
def test_amplitude_is_first_crossing(omega):
    nl = model.polynomial([1.0, -0.5])
    X_omega = model.amplitude(nl, omega)
    Xs = np.linspace(0.0, X_omega, 200)[1:-1]
    assert np.all(omega * Xs < nl.G(Xs))
    assert omega * X_omega == pytest.approx(float(nl.G(X_omega)), abs=1e-9)
