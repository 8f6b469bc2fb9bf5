"""Surface dipole noise integrals and heating-rate extrapolation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from electrap import noise
from electrap.errors import ValidationError

TWO_PI = 2 * math.pi


def test_plane_isotropic_closed_form():
    # orientation-averaged |E|^2 = 2/r^6; the plane integral gives pi / d^4
    for d in (1.0, 2.5):
        assert noise.plane_reference(d) == pytest.approx(math.pi / d ** 4, rel=2e-3)


def test_plane_normal_z_closed_form():
    # E_z of a normal dipole is (3cos^2 - 1)/r^3, integrating to 3 pi / (4 d^4)
    val = noise.plane_reference(1.0, "normal", axis=(0, 0, 1))
    assert val == pytest.approx(0.75 * math.pi, rel=2e-3)


@pytest.mark.parametrize("orientation", ["isotropic", "normal", "tangential"])
def test_plane_distance_exponent(orientation):
    slope = noise.fit_distance_exponent(np.logspace(-5, -4, 5), orientation)
    assert slope == pytest.approx(-4.0, abs=0.08)


def test_cone_limits():
    assert noise.cone_noise_factor(math.pi) == pytest.approx(1.0, rel=2e-3)
    a = math.radians(20)
    assert noise.cone_noise_factor(a) == pytest.approx(a / 10, rel=0.25)


def test_cone_factor_monotone_in_opening():
    vals = [noise.cone_noise_factor(math.radians(a)) for a in (10, 30, 90, 150)]
    assert np.all(np.diff(vals) > 0)


def test_ring_closed_form():
    assert noise.ring_noise_factor(1.0, 0.0) == 2.0
    assert noise.ring_noise_factor(1.0, 0.3) == pytest.approx(3.2)
    with pytest.raises(ValidationError):
        noise.ring_noise_factor(0.0, 0.1)


@pytest.mark.parametrize("x", [0.0, 0.1, 0.3])
def test_ring_numeric_within_30_percent(x):
    num = noise.ring_noise_factor_numeric(1.0, x)
    assert num == pytest.approx(noise.ring_noise_factor(1.0, x), rel=0.30)


def test_ring_thin_limit_is_two_half_planes():
    # a = 0: two annuli with a hole, each weaker than a full plane at D/2
    assert noise.ring_noise_factor_numeric(1.0, 0.0) == pytest.approx(2.0, rel=0.01)


def test_geometry_validation():
    with pytest.raises(ValidationError):
        noise.SurfaceGeometry("sphere")
    with pytest.raises(ValidationError):
        noise.SurfaceGeometry("cone", alpha=0.0)
    with pytest.raises(ValidationError):
        noise.dipole_field_noise(noise.SurfaceGeometry("plane", distance=1.0), (0, 0, -1.0))


def test_heating_rate_round_trip():
    res = noise.heating_rate(1e-11, TWO_PI * 500e6)
    assert res.rate * res.tau1 == pytest.approx(1.0)
    assert noise.noise_for_rate(res.rate, TWO_PI * 500e6) == pytest.approx(1e-11, rel=1e-12)


@settings(max_examples=30)
@given(st.floats(1e-14, 1e-8), st.floats(1e5, 1e8), st.floats(0.5, 2.0), st.floats(1e-3, 1e3))
def test_calibration_scale_invariance(s_ref, f_ref, beta, k):
    a = noise.DipoleNoiseModel(s_ref, f_ref, beta, strength=1.0).spectral_density(500e6)
    b = noise.DipoleNoiseModel(s_ref * k, f_ref, beta, strength=1.0 / k).spectral_density(500e6)
    w = TWO_PI * 500e6
    assert noise.heating_rate(b, w).rate == pytest.approx(noise.heating_rate(a, w).rate, rel=1e-9)


def test_frequency_exponent_bounds():
    with pytest.raises(ValidationError):
        noise.DipoleNoiseModel(1e-11, 1e6, beta=2.5)


def test_heating_pair_from_one_calibration():
    f_ref, s_ref, res = noise.electron_heating_pair()
    assert f_ref == pytest.approx(3.6e6, rel=0.10)
    assert res[1.0].rate == pytest.approx(8100.0, rel=1e-9)
    assert res[1.5].rate == pytest.approx(690.0, rel=1e-9)
    assert res[1.0].tau1 == pytest.approx(123.5e-6, rel=1e-3)
