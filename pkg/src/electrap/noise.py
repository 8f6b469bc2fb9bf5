"""Electric-field noise from incoherent surface dipoles, and motional heating.

Geometries share a common frame: the observation point defaults to the
origin and the symmetry axis of every surface is ``z``. Results are in
relative units (unit dipole strength and surface density); only ratios and
scaling exponents are meaningful until calibrated.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONST, TWO_PI
from .errors import IntegrationFailure, ValidationError

KINDS = ("plane", "cone", "ring")
ORIENTATIONS = ("isotropic", "normal", "tangential")
CUTOFF = 1e3


@dataclass(frozen=True)
class SurfaceGeometry:
    """Electrode surface seen from the observation point.

    plane: infinite plane ``z = -distance``.
    cone: apex at ``(0, 0, -distance)`` opening away from the point with full
    opening angle ``alpha``.
    ring: inner diameter ``D`` and axial thickness ``a``, centred on the point.
    ``axis`` selects the sensitive field component (``None`` sums all three).
    """

    kind: str
    distance: float = 1.0
    alpha: float = math.pi
    D: float = 2.0
    a: float = 0.0
    axis: tuple = None
    orientation: str = "isotropic"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown surface kind {self.kind!r}")
        if self.orientation not in ORIENTATIONS:
            raise ValidationError(f"unknown dipole orientation {self.orientation!r}")
        if not (self.distance > 0 and self.D > 0 and self.a >= 0):
            raise ValidationError("distance and D must be > 0, a >= 0")
        if not 0 < self.alpha <= math.pi:
            raise ValidationError("opening angle must lie in (0, pi]")
        if self.axis is not None:
            v = np.asarray(self.axis, dtype=float)
            if v.shape != (3,) or not np.linalg.norm(v) > 0:
                raise ValidationError("axis must be a non-zero 3-vector")
            object.__setattr__(self, "axis", tuple(v / np.linalg.norm(v)))

    @property
    def scale(self):
        return self.D / 2 if self.kind == "ring" else self.distance


# --------------------------------------------------------------------------
# parametrized patches: each returns (points, normals, tangents, jacobian)
# evaluated on a (u, phi) mesh


def _patches(g):
    if g.kind == "plane":
        return [(_plane_patch(g.distance), "log", (0.0, CUTOFF * g.distance))]
    if g.kind == "cone":
        return [(_cone_patch(g.distance, 0.5 * g.alpha), "log", (0.0, CUTOFF * g.distance))]
    R = 0.5 * g.D
    out = [
        (_annulus_patch(0.5 * g.a), "log-from", (R, CUTOFF * R)),
        (_annulus_patch(-0.5 * g.a), "log-from", (R, CUTOFF * R)),
    ]
    if g.a > 0:
        out.append((_cylinder_patch(R), "linear", (-0.5 * g.a, 0.5 * g.a)))
    return out


def _plane_patch(d):
    def f(u, ph):
        c, s = np.cos(ph), np.sin(ph)
        pts = np.stack([u * c, u * s, np.full_like(u, -d)], axis=-1)
        nrm = np.broadcast_to([0.0, 0.0, 1.0], pts.shape)
        tan = np.stack([-s, c, np.zeros_like(u)], axis=-1)
        return pts, nrm, tan, u
    return f


def _cone_patch(R0, th):
    st, ct = math.sin(th), math.cos(th)

    def f(u, ph):
        c, s = np.cos(ph), np.sin(ph)
        pts = np.stack([u * st * c, u * st * s, -R0 - u * ct], axis=-1)
        nrm = np.stack([ct * c, ct * s, np.full_like(u, st)], axis=-1)
        tan = np.stack([-s, c, np.zeros_like(u)], axis=-1)
        return pts, nrm, tan, u * st
    return f


def _annulus_patch(z):
    sign = -1.0 if z > 0 else 1.0

    def f(u, ph):
        c, s = np.cos(ph), np.sin(ph)
        pts = np.stack([u * c, u * s, np.full_like(u, z)], axis=-1)
        nrm = np.broadcast_to([0.0, 0.0, sign], pts.shape)
        tan = np.stack([-s, c, np.zeros_like(u)], axis=-1)
        return pts, nrm, tan, u
    return f


def _cylinder_patch(R):
    def f(u, ph):
        c, s = np.cos(ph), np.sin(ph)
        pts = np.stack([R * c, R * s, u], axis=-1)
        nrm = np.stack([-c, -s, np.zeros_like(u)], axis=-1)
        tan = np.stack([-s, c, np.zeros_like(u)], axis=-1)
        return pts, nrm, tan, np.full_like(u, R)
    return f


def _dipole_power(pts, nrm, tan, obs, orientation, axis):
    """Squared (projected) field at ``obs`` averaged over dipole orientations."""
    r = obs - pts
    dist = np.linalg.norm(r, axis=-1, keepdims=True)
    rh = r / dist
    inv3 = dist[..., 0] ** -3

    def power(p):
        e = (3.0 * np.sum(p * rh, axis=-1, keepdims=True) * rh - p) * inv3[..., None]
        if axis is None:
            return np.sum(e * e, axis=-1)
        return np.sum(e * np.asarray(axis), axis=-1) ** 2

    if orientation == "normal":
        return power(nrm)
    if orientation == "tangential":
        return 0.5 * (power(tan) + power(np.cross(nrm, tan)))
    # isotropic: mean over a fixed orthonormal basis
    return sum(power(np.broadcast_to(e, pts.shape)) for e in np.eye(3)) / 3.0


def _edges(mode, span, scale, panels):
    lo, hi = span
    if mode == "linear":
        return np.linspace(lo, hi, panels + 1)
    if mode == "log":
        inner = scale * np.logspace(-2, math.log10(hi / scale), panels)
        return np.concatenate([[0.0], inner])
    return lo * np.logspace(0, math.log10(hi / lo), panels + 1)


def _integrate(g, obs, panels, order, n_phi):
    x, w = np.polynomial.legendre.leggauss(order)
    ph = TWO_PI * np.arange(n_phi) / n_phi
    total = 0.0
    for patch, mode, span in _patches(g):
        e = _edges(mode, span, g.scale, panels)
        a, b = e[:-1, None], e[1:, None]
        u = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
        wu = (0.5 * (b - a) * w).ravel()
        U, PH = np.meshgrid(u, ph, indexing="ij")
        pts, nrm, tan, jac = patch(U, PH)
        val = _dipole_power(pts, nrm, tan, obs, g.orientation, g.axis) * jac
        total += float(np.sum(wu[:, None] * val) * TWO_PI / n_phi)
    return total


def dipole_field_noise(surface, point=(0.0, 0.0, 0.0), rtol=1e-3, max_refinements=6):
    """Incoherent sum of squared dipole fields over ``surface`` at ``point``.

    The mesh is refined (panels and azimuthal points doubled) until two
    successive estimates agree to ``rtol``.
    """
    obs = np.asarray(point, dtype=float)
    _check_off_surface(surface, obs)
    panels, n_phi = 24, 32
    prev = _integrate(surface, obs, panels, 8, n_phi)
    for _ in range(max_refinements):
        panels, n_phi = 2 * panels, 2 * n_phi
        cur = _integrate(surface, obs, panels, 8, n_phi)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise IntegrationFailure(f"surface integral did not converge to rtol={rtol}")


def _check_off_surface(g, obs):
    x, y, z = obs
    rho = math.hypot(x, y)
    if g.kind == "plane" and abs(z + g.distance) < 1e-12 * g.distance:
        raise ValidationError("observation point lies on the plane")
    if g.kind == "cone":
        th = 0.5 * g.alpha
        s = -(z + g.distance)
        if s >= 0 and abs(rho * math.cos(th) - s * math.sin(th)) < 1e-12 * g.distance:
            raise ValidationError("observation point lies on the cone")
    if g.kind == "ring" and rho >= 0.5 * g.D * (1 - 1e-12) and abs(z) <= 0.5 * g.a:
        raise ValidationError("observation point lies inside the ring electrode")


def plane_reference(distance, orientation="isotropic", axis=None):
    return dipole_field_noise(SurfaceGeometry("plane", distance=distance,
                                              orientation=orientation, axis=axis))


def cone_noise_factor(alpha, orientation="isotropic", axis=None):
    """Tip noise over plane noise at the same apex distance."""
    cone = SurfaceGeometry("cone", distance=1.0, alpha=alpha, orientation=orientation, axis=axis)
    return dipole_field_noise(cone) / plane_reference(1.0, orientation, axis)


def ring_noise_factor(D, a):
    """Closed-form ring factor ``2 (1 + 2a/D)`` relative to a plane at ``D/2``."""
    if not D > 0 or a < 0:
        raise ValidationError("D must be > 0 and a >= 0")
    return 2.0 * (1.0 + 2.0 * a / D)


def ring_noise_factor_numeric(D, a, orientation="isotropic", axis=None):
    ring = SurfaceGeometry("ring", D=D, a=a, orientation=orientation, axis=axis)
    return dipole_field_noise(ring) / plane_reference(0.5 * D, orientation, axis)


def fit_distance_exponent(distances, orientation="isotropic", axis=None):
    """Log-log slope of plane noise against distance."""
    d = np.asarray(distances, dtype=float)
    s = np.array([plane_reference(x, orientation, axis) for x in d])
    return float(np.polyfit(np.log(d), np.log(s), 1)[0])


# --------------------------------------------------------------------------
# spectra and heating


@dataclass(frozen=True)
class DipoleNoiseModel:
    S_ref: float
    f_ref: float
    beta: float = 1.0
    strength: float = 1.0

    def __post_init__(self):
        if not 0.5 <= self.beta <= 2.0:
            raise ValidationError("frequency exponent must lie in [0.5, 2]")
        if not (self.S_ref > 0 and self.f_ref > 0 and self.strength > 0):
            raise ValidationError("reference values must be positive")

    def spectral_density(self, f):
        return self.strength * extrapolate_noise(self.S_ref, self.f_ref, f, self.beta)


@dataclass(frozen=True)
class HeatingResult:
    S_E: float
    rate: float
    tau1: float


def extrapolate_noise(S_ref, f_ref, f, beta):
    """Power-law extrapolation ``S_ref (f_ref / f)^beta``."""
    if not (f > 0 and f_ref > 0):
        raise ValidationError("frequencies must be positive")
    return S_ref * (f_ref / f) ** beta


def heating_rate(S_E, omega, mass=CONST.m_e, charge=CONST.e):
    """Heating ``q^2 S_E / (4 m hbar w)`` in quanta/s for a single-sided ``S_E``."""
    if not (S_E > 0 and omega > 0 and mass > 0):
        raise ValidationError("S_E, omega and mass must be positive")
    rate = charge ** 2 * S_E / (4.0 * mass * CONST.hbar * omega)
    return HeatingResult(S_E, rate, 1.0 / rate)


def noise_for_rate(rate, omega, mass=CONST.m_e, charge=CONST.e):
    """Inverse of :func:`heating_rate`."""
    return 4.0 * mass * CONST.hbar * omega * rate / charge ** 2


def implied_reference_frequency(f, rate_beta1, rate_beta15):
    """Reference frequency at which the two power laws were anchored.

    Solves ``(f / f_ref)^(1/2) = rate_beta1 / rate_beta15``.
    """
    return f / (rate_beta1 / rate_beta15) ** 2


def calibrate_reference(rate, f, f_ref, beta=1.0, mass=CONST.m_e, charge=CONST.e):
    """Reference density ``S_ref`` at ``f_ref`` that yields ``rate`` at ``f``."""
    s_f = noise_for_rate(rate, TWO_PI * f, mass, charge)
    return s_f * (f / f_ref) ** beta


def electron_heating_pair(f=500e6, rate_beta1=8100.0, rate_beta15=690.0):
    """Calibrate once with ``beta = 1`` and predict both exponents.

    Returns ``(f_ref, S_ref, {beta: HeatingResult})``.
    """
    f_ref = implied_reference_frequency(f, rate_beta1, rate_beta15)
    s_ref = calibrate_reference(rate_beta1, f, f_ref, 1.0)
    out = {}
    for beta in (1.0, 1.5):
        s = DipoleNoiseModel(s_ref, f_ref, beta).spectral_density(f)
        out[beta] = heating_rate(s, TWO_PI * f)
    return f_ref, s_ref, out
