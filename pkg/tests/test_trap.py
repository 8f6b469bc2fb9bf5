"""Classical trap dynamics, spectra and the Floquet oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from electrap import trap
from electrap.constants import CONST
from electrap.errors import ValidationError

TWO_PI = 2 * math.pi
W_RF = TWO_PI * 1e9


def _pure_rf(q, a=0.0, Omega=W_RF):
    """Trap whose y axis has Mathieu parameters (a, q); x and z share the remainder."""
    k = -CONST.e / (CONST.m_e * Omega ** 2)
    c_y = -q / (4 * k)
    c_dc = a / (8 * k)
    return trap.TrapFieldModel(CONST.m_e, -CONST.e, Omega, c_rf=(-0.5 * c_y, c_y, -0.5 * c_y),
                               c_dc=(-0.5 * c_dc, c_dc, -0.5 * c_dc))


def _measured_secular(model, periods=120):
    w = model.secular_estimate()[1]
    rec = trap.integrate_motion(model, (1e-9, 1e-9, 1e-9), (0, 0, 0),
                                (0.0, periods * TWO_PI / w), stride=4)
    spec = trap.extract_spectrum(rec, "y")
    return spec.frequencies[np.argmax(spec.amplitudes)], rec


@pytest.mark.parametrize("q", [0.1, 0.3, 0.4])
def test_secular_frequency_matches_floquet(q):
    model = _pure_rf(q)
    measured, rec = _measured_secular(model)
    oracle = trap.floquet_secular(model)[1]
    assert trap.is_bounded(rec)
    assert measured == pytest.approx(oracle, rel=0.05)


def test_floquet_oracle_small_q_limit():
    # beta -> q / sqrt(2) as q -> 0
    stable, beta = trap.floquet_exponent(0.0, 0.05)
    assert stable and beta == pytest.approx(0.05 / math.sqrt(2), rel=1e-3)


def test_stability_edge():
    assert trap.stability_edge() == pytest.approx(0.908, rel=0.02)
    assert not trap.floquet_exponent(0.0, 2.0)[0]


def test_stability_scan_agrees_with_floquet():
    qs = np.array([0.3, 0.6, 0.85, 0.95, 1.2, 2.0])
    stable = trap.stability_scan([0.0], qs)[0]
    assert list(stable) == [trap.floquet_exponent(0.0, q)[0] for q in qs]


def test_unstable_trajectory_escapes():
    model = _pure_rf(1.2)
    rec = trap.integrate_motion(model, (1e-9, 1e-9, 1e-9), (0, 0, 0), (0.0, 400 * TWO_PI / W_RF))
    assert not trap.is_bounded(rec)


def test_laplace_constraint():
    with pytest.raises(ValidationError):
        trap.TrapFieldModel(CONST.m_e, -CONST.e, W_RF, c_rf=(1.0, 1.0, 1.0))


@settings(max_examples=25)
@given(st.floats(1e3, 1e9), st.floats(-1e9, 1e9))
def test_laplace_satisfied_for_balanced_curvature(cx, cy):
    trap.TrapFieldModel(CONST.m_e, -CONST.e, W_RF, c_rf=(cx, cy, -cx - cy))


def test_section3_preset_secular_estimate():
    model = trap.section3_model()
    w = model.secular_estimate()
    assert w == pytest.approx([TWO_PI * 400e6, TWO_PI * 500e6, TWO_PI * 400e6], rel=1e-9)
    a, _ = model.mathieu()
    assert abs(np.sum(a)) < 1e-12


def test_driven_orbit_amplitude():
    model = trap.section3_model()
    r0, v0 = trap.driven_initial_conditions(model)
    assert math.hypot(r0[1], v0[1] / model.Omega_d) == pytest.approx(350e-9, rel=1e-12)
    assert r0[0] == r0[2] == 0.0


def test_spectrum_needs_samples():
    model = _pure_rf(0.3)
    rec = trap.integrate_motion(model, (1e-9,) * 3, (0, 0, 0), (0.0, 10 * TWO_PI / W_RF))
    with pytest.raises(ValidationError):
        trap.extract_spectrum(rec)


def test_spectrum_sorted_nonnegative():
    _, rec = _measured_secular(_pure_rf(0.3))
    spec = trap.extract_spectrum(rec, "y", "quadrupole")
    assert np.all(np.diff(spec.frequencies) > 0)
    assert np.all(spec.amplitudes >= 0)


def test_pseudopotential_ratio_closed_form_and_simulation():
    omega = TWO_PI * 500e6
    assert trap.drive_pseudopotential_ratio(20 * omega, omega) == pytest.approx(100.0)
    assert trap.drive_pseudopotential_ratio(trap.limiting_drive_frequency(omega), omega) == \
        pytest.approx(trap.LIMIT_BUDGET)
    ratio, amp = trap.simulated_pseudopotential_ratio(omega, 20 * omega, drive_periods=100)
    assert ratio == pytest.approx(100.0, rel=0.02)
    assert amp == pytest.approx(350e-9, rel=0.02)
