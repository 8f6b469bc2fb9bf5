"""CPW impedance, line-cavity coupling, dressing and pickup."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from electrap import circuit
from electrap.constants import CONST
from electrap.errors import ModelInconsistency, NotDispersive, ValidationError

TWO_PI = 2 * math.pi
MHZ = TWO_PI * 1e6


def test_effective_impedance():
    assert circuit.effective_impedance(50.0, 1) == pytest.approx(63.66, abs=0.01)
    assert circuit.effective_impedance(50.0, 2) == pytest.approx(0.5 * circuit.effective_impedance(50.0, 1))
    assert circuit.required_cpw_impedance(1000.0) == pytest.approx(785.4, abs=0.1)
    with pytest.raises(ValidationError):
        circuit.effective_impedance(50.0, 0)


def _line(l_frac=0.5, d0=200e-6, lam=17e-3):
    return circuit.CPWLine(785.4, 1, lam, d0, l_frac * lam)


def test_vacuum_field():
    cav = circuit.CavityMode(TWO_PI * 7e9, 1e-6)
    expected = math.sqrt(CONST.hbar * TWO_PI * 7e9 / (2 * CONST.eps0 * 1e-6))
    assert cav.E_C0 == pytest.approx(expected, rel=1e-12)


def test_cavity_coupling_preset():
    cav = circuit.CavityMode(TWO_PI * 7e9, circuit.CAVITY_VOLUME_PRESET)
    res = circuit.cpw_cavity_coupling(_line(), cav, 1000.0)
    assert res.G_closed == pytest.approx(10 * MHZ, rel=0.01)
    assert res.relative_difference < 0.05


def test_cavity_coupling_scalings():
    cav = circuit.CavityMode(TWO_PI * 7e9, circuit.CAVITY_VOLUME_PRESET)
    g1 = circuit.cpw_cavity_coupling(_line(d0=100e-6), cav, 1000.0).G_closed
    g2 = circuit.cpw_cavity_coupling(_line(d0=200e-6), cav, 1000.0).G_closed
    assert g2 == pytest.approx(2 * g1, rel=1e-12)
    assert circuit.cpw_cavity_coupling(_line(0.0), cav, 1000.0).G_closed == 0.0


def test_cavity_coupling_inconsistency_raises():
    cav = circuit.CavityMode(TWO_PI * 7e9, circuit.CAVITY_VOLUME_PRESET)
    with pytest.raises(ModelInconsistency):
        circuit.cpw_cavity_coupling(_line(), cav, 1000.0, points=1)


def test_line_integral_second_order():
    cav = circuit.CavityMode(TWO_PI * 7e9, circuit.CAVITY_VOLUME_PRESET)
    line = _line()
    prof = lambda x: 1.0 + np.asarray(x) ** 2  # noqa: E731
    ref = circuit.coupling_integral(line, cav, 1000.0, prof, 4096)
    e1 = abs(circuit.coupling_integral(line, cav, 1000.0, prof, 32) - ref)
    e2 = abs(circuit.coupling_integral(line, cav, 1000.0, prof, 64) - ref)
    assert e1 / e2 == pytest.approx(4.0, rel=0.05)


def test_line_validation():
    with pytest.raises(ValidationError):
        _line(0.6)


def test_volume_inverse():
    V = circuit.cavity_volume_for_coupling(10 * MHZ, TWO_PI * 7e9, 200e-6, 1000.0)
    assert V == pytest.approx(circuit.CAVITY_VOLUME_PRESET, rel=0.01)


def _c4(Delta, G_tc=40 * MHZ, G_lc=3 * MHZ):
    return circuit.coupling_matrix4(TWO_PI * 7e9, 1.1 * MHZ, 1.8 * MHZ, G_lc, Delta, G_tc)


def test_matrix4_structure():
    c4 = _c4(1000 * MHZ)
    circuit.validate_matrix4(c4)
    for i, j in ((0, 2), (0, 3), (1, 3)):
        assert c4[i, j] == 0
    bad = c4.copy()
    bad[0, 3] = bad[3, 0] = 1.0
    with pytest.raises(ValidationError):
        circuit.validate_matrix4(bad)


def test_eliminated_coupling_example():
    g = circuit.eliminated_coupling(3 * MHZ, 100 * MHZ, 272.7 * MHZ)
    assert g == pytest.approx(1.1 * MHZ, rel=1e-3)


def test_non_dispersive_example_raises():
    with pytest.raises(NotDispersive):
        circuit.dress_and_reduce(_c4(272.7 * MHZ, G_tc=100 * MHZ))


@settings(max_examples=30, deadline=None)
@given(st.floats(10.5, 200.0))
def test_reduced_eigenvalues_within_bound(ratio):
    G_tc = 40 * MHZ
    Delta = ratio * G_tc
    c4 = _c4(Delta, G_tc)
    red = circuit.dress_and_reduce(c4)
    _, _, dev = circuit.compare_eigenvalues(c4, red)
    assert dev <= (G_tc / Delta) ** 2
    assert red.G_lt == pytest.approx(3 * MHZ * G_tc / Delta, rel=1e-12)


def test_reduction_decouples_without_line_coupling():
    red = circuit.dress_and_reduce(_c4(1000 * MHZ, G_lc=0.0))
    assert red.reduced[1, 2] == 0.0


def test_reduction_shift_invariance():
    c4 = _c4(1000 * MHZ)
    a = circuit.dress_and_reduce(c4)
    b = circuit.dress_and_reduce(c4 + 5 * MHZ * np.eye(4))
    assert b.G_lt == pytest.approx(a.G_lt, rel=1e-12)
    assert np.allclose(b.reduced - a.reduced, 5 * MHZ * np.eye(3), rtol=0, atol=1e-3)


def test_dispersive_warning_band():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        circuit.dress_and_reduce(_c4(7 * 40 * MHZ))
    assert any("dispersive" in str(x.message) for x in w)


def _net(imbalance=10e-18):
    C = 1.0 / (TWO_PI * 7e9 * 1000.0)
    return circuit.PickupNetwork(1e-15, 1e-15 - imbalance, C, 0.2, C_fine=10e-18)


Q0 = math.sqrt(CONST.hbar / 2000.0)


def test_balanced_network_is_dark():
    assert circuit.pickup_excitation(_net(0.0), Q0) == 0.0


@settings(max_examples=30)
@given(st.floats(1e-19, 1e-16), st.floats(0.1, 10.0))
def test_pickup_quadratic_in_imbalance(imb, k):
    a = circuit.pickup_excitation(_net(imb), Q0)
    b = circuit.pickup_excitation(_net(k * imb), Q0)
    assert b == pytest.approx(k * k * a, rel=1e-6)


def test_calibrated_pickup_and_fine_tune():
    net = _net()
    T = circuit.calibrate_transfer(net, Q0, 200.0)
    assert circuit.pickup_excitation(net, Q0, T) == pytest.approx(200.0)
    tuned = circuit.balanced_fine_tune(net)
    assert circuit.pickup_excitation(tuned, Q0, T) < 1e-20
    off = circuit.balanced_fine_tune(net, amplitude_error=0.4e-3)
    assert circuit.pickup_excitation(off, Q0, T) <= 1e-3
    amp_tol, ph_tol = circuit.fine_tune_tolerances(net, Q0, T)
    at_tol = circuit.balanced_fine_tune(net, amplitude_error=amp_tol)
    assert circuit.pickup_excitation(at_tol, Q0, T) == pytest.approx(1e-3, rel=1e-6)
    at_ph = circuit.balanced_fine_tune(net, phase_error=ph_tol)
    assert circuit.pickup_excitation(at_ph, Q0, T) == pytest.approx(1e-3, rel=1e-6)


def test_pickup_validation():
    with pytest.raises(ValidationError):
        circuit.PickupNetwork(1e-15, 1e-15, 1e-13, delta_det=0.0)
    with pytest.raises(ValidationError):
        circuit.PickupNetwork(-1e-15, 1e-15, 1e-13)
