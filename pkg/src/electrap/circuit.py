"""Resonator and coupling-network design: CPW impedance, line-cavity coupling,
cavity-transmon dressing with adiabatic elimination, and pickup estimates."""

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONST, TWO_PI
from .errors import ModelInconsistency, ValidationError
from .params import check_dispersive

# --------------------------------------------------------------------------
# CPW resonators


def effective_impedance(Z_cpw, n=1):
    """Lumped impedance ``4 Z_cpw / (n pi)`` of the ``n``-th CPW resonator mode."""
    if int(n) != n or n < 1:
        raise ValidationError(f"mode index must be an integer >= 1, got {n}")
    return 4.0 * Z_cpw / (n * math.pi)


def required_cpw_impedance(Z, n=1):
    """Characteristic impedance giving a lumped impedance ``Z`` at mode ``n``."""
    if int(n) != n or n < 1:
        raise ValidationError(f"mode index must be an integer >= 1, got {n}")
    return Z * n * math.pi / 4.0


@dataclass(frozen=True)
class CPWLine:
    Z_cpw: float
    n: int
    wavelength: float
    d0: float
    l_eff: float

    def __post_init__(self):
        if not self.d0 > 0 or not self.wavelength > 0:
            raise ValidationError("d0 and wavelength must be > 0")
        if not 0 <= self.l_eff <= 0.5 * self.wavelength * (1 + 1e-12):
            raise ValidationError("effective length must lie in [0, wavelength/2]")


@dataclass(frozen=True)
class CavityMode:
    omega_c: float
    V: float

    def __post_init__(self):
        if not (self.omega_c > 0 and self.V > 0):
            raise ValidationError("cavity frequency and mode volume must be > 0")

    @property
    def E_C0(self):
        """Vacuum field amplitude ``sqrt(hbar w / (2 eps0 V))`` in V/m."""
        return math.sqrt(CONST.hbar * self.omega_c / (2.0 * CONST.eps0 * self.V))


def cavity_volume_for_coupling(G_lc, omega_c, d0, Z, l_over_lambda=0.5):
    """Mode volume for which the closed-form line-cavity coupling equals ``G_lc``."""
    q0 = math.sqrt(CONST.hbar / (2.0 * Z))
    E = CONST.hbar * G_lc / (q0 * d0 * l_over_lambda)
    return CONST.hbar * omega_c / (2.0 * CONST.eps0 * E ** 2)


# 2pi x 10 MHz with d0 = 200 um, l_eff = lambda/2, Z = 1 kOhm at 7 GHz
CAVITY_VOLUME_PRESET = 3.14e-6


@dataclass
class LineCavityCoupling:
    G_closed: float
    G_integral: float

    @property
    def relative_difference(self):
        return abs(self.G_integral - self.G_closed) / abs(self.G_closed) if self.G_closed else 0.0


def line_dipole_profile(z, line, q0):
    """Charge-dipole density along the half-wave line, normalized so its mean is ``d0 q0 / lambda``."""
    amp = 0.5 * math.pi * line.d0 * q0 / line.wavelength
    return amp * np.sin(TWO_PI * np.asarray(z) / line.wavelength)


def coupling_integral(line, cavity, Z, field_profile=None, points=400):
    """``l_eff`` times the line average of ``mu(z) E(z)`` (midpoint rule), divided by hbar."""
    q0 = math.sqrt(CONST.hbar / (2.0 * Z))
    half = 0.5 * line.wavelength
    z = (np.arange(points) + 0.5) * half / points
    E = cavity.E_C0 * (np.ones_like(z) if field_profile is None else field_profile(z / half))
    mean = float(np.mean(line_dipole_profile(z, line, q0) * E))
    return line.l_eff * mean / CONST.hbar


def cpw_cavity_coupling(line, cavity, Z, field_profile=None, points=400, tol=0.05):
    """Line-cavity coupling ``G_lc`` (rad/s) from ``hbar G = E_C0 q0 d0 l_eff / lambda``.

    The discretized line integral is evaluated alongside; for a uniform field
    the two must agree within ``tol``. ``field_profile`` maps the normalized
    position along the line to the relative field.
    """
    q0 = math.sqrt(CONST.hbar / (2.0 * Z))
    closed = cavity.E_C0 * q0 * line.d0 * line.l_eff / (line.wavelength * CONST.hbar)
    integral = coupling_integral(line, cavity, Z, field_profile, points)
    result = LineCavityCoupling(closed, integral)
    if field_profile is None and result.relative_difference > tol:
        raise ModelInconsistency(
            f"line integral differs from closed form by {result.relative_difference:.3g}"
        )
    return result


# --------------------------------------------------------------------------
# four-mode dressing


ORDER = ("electron", "line", "cavity", "transmon")


def coupling_matrix4(omega, g_p, delta, G_lc, Delta, G_tc, omega_t=None):
    """Hermitian 4x4 matrix of ``H/hbar = a^dag C a`` in order (electron, line, cavity, transmon).

    ``Delta`` is the bare cavity-transmon detuning. By default the bare
    transmon sits at ``omega + G_tc^2/Delta`` so the dressed transmon lands at
    ``omega``.
    """
    if omega_t is None:
        omega_t = omega + G_tc ** 2 / Delta
    c = np.diag([omega, omega + delta, omega_t + Delta, omega_t]).astype(float)
    c[0, 1] = c[1, 0] = g_p
    c[1, 2] = c[2, 1] = G_lc
    c[2, 3] = c[3, 2] = G_tc
    return c


def validate_matrix4(c4):
    c4 = np.asarray(c4)
    if c4.shape != (4, 4) or not np.allclose(c4, c4.conj().T, rtol=0, atol=1e-9 * np.max(np.abs(c4))):
        raise ValidationError("coupling matrix must be 4x4 Hermitian")
    for i, j in ((0, 2), (0, 3), (1, 3)):
        if c4[i, j] != 0:
            raise ValidationError(f"entry ({ORDER[i]}, {ORDER[j]}) must vanish")
    return c4


def eliminated_coupling(G_lc, G_tc, Delta):
    """Effective line-transmon coupling ``G_lc G_tc / Delta`` (no regime check)."""
    if Delta == 0:
        raise ValidationError("Delta must be non-zero")
    return G_lc * G_tc / Delta


@dataclass
class Reduction:
    reduced: np.ndarray
    G_lt: float
    dressed_transmon: float
    dressed_cavity: float
    line_shift: float
    mixing: float


def dress_and_reduce(c4, line_shift=True):
    """Dress the cavity-transmon pair to first order in ``G_tc/Delta`` and drop the cavity mode.

    The transmon-like mode ``|t> - (G_tc/Delta)|c>`` inherits the line
    coupling ``-G_lc G_tc / Delta``. Second-order frequency shifts of the
    transmon (``-G_tc^2/Delta``) and, with ``line_shift``, of the line
    (``G_lc^2/(w_l - w_c)``) are applied to the reduced diagonal.
    """
    c4 = validate_matrix4(c4)
    w_l, w_c, w_t = c4[1, 1].real, c4[2, 2].real, c4[3, 3].real
    G_lc, G_tc = c4[1, 2].real, c4[2, 3].real
    Delta = w_c - w_t
    check_dispersive(Delta, G_tc)
    eps = G_tc / Delta
    G_lt = -eliminated_coupling(G_lc, G_tc, Delta)
    shift_t = -G_tc ** 2 / Delta
    shift_l = G_lc ** 2 / (w_l - w_c) if line_shift else 0.0
    r = np.zeros((3, 3), dtype=float)
    r[0, 0] = c4[0, 0].real
    r[1, 1] = w_l + shift_l
    r[2, 2] = w_t + shift_t
    r[0, 1] = r[1, 0] = c4[0, 1].real
    r[1, 2] = r[2, 1] = G_lt
    return Reduction(r, abs(G_lt), w_t + shift_t, w_c - shift_t, shift_l, eps)


def compare_eigenvalues(c4, reduction):
    """Reduced eigenvalues against the three non-cavity eigenvalues of the full matrix.

    Returns ``(reduced, full, max relative deviation)`` with frequencies
    measured from the electron frequency. The deviation is normalized by the
    larger of the largest full-matrix offset and the dispersive shift
    ``G_tc^2/Delta``; first-order dressing leaves an error of relative order
    ``(G_tc/Delta)^2`` on that scale.
    """
    c4 = np.asarray(c4, dtype=float)
    w, v = np.linalg.eigh(c4)
    keep = np.argsort(np.abs(v[2, :]))[:3]
    full = np.sort(w[keep]) - c4[0, 0]
    red = np.sort(np.linalg.eigvalsh(reduction.reduced)) - c4[0, 0]
    Delta = c4[2, 2] - c4[3, 3]
    scale = max(np.max(np.abs(full)), c4[2, 3] ** 2 / abs(Delta))
    return red, full, float(np.max(np.abs(red - full)) / scale)


# --------------------------------------------------------------------------
# capacitive pickup


@dataclass(frozen=True)
class PickupNetwork:
    C_p: float
    C_b: float
    C: float
    V_d: float = 0.2
    C_fine: float = 0.0
    V_fine: float = 0.0
    phase_fine: float = 0.0
    delta_det: float = TWO_PI * 500e6

    def __post_init__(self):
        if min(self.C_p, self.C_b, self.C_fine) < 0 or not self.C > 0:
            raise ValidationError("capacitances must be >= 0 (resonator C > 0)")
        if self.delta_det == 0:
            raise ValidationError("detuning must be non-zero")

    def net_charge(self):
        """Phasor sum of pickup, balancing and fine-tune paths (C)."""
        return (self.V_d * (self.C_p - self.C_b)
                - self.V_fine * self.C_fine * np.exp(1j * self.phase_fine))


def pickup_excitation(net, q0, transfer=1.0):
    """Steady-state photons ``(eps / delta)^2`` of the off-resonantly driven resonator."""
    eps = float(abs(net.net_charge())) / net.C * q0 / CONST.hbar * transfer
    return (eps / net.delta_det) ** 2


def calibrate_transfer(net, q0, photons):
    """Transfer factor that makes ``net`` produce ``photons``."""
    naive = pickup_excitation(net, q0, 1.0)
    if naive == 0:
        raise ValidationError("balanced network cannot be calibrated")
    return math.sqrt(photons / naive)


def fine_tune_tolerances(net, q0, transfer, budget=1e-3):
    """Fine-tune amplitude (V) and phase (rad) errors that each leave ``budget`` photons.

    ``net`` is the unbalanced network; the ideal fine-tune cancels it exactly.
    """
    n0 = pickup_excitation(net, q0, transfer)
    if n0 == 0:
        return math.inf, math.inf
    ratio = math.sqrt(budget / n0)
    v_ideal = abs(net.V_d * (net.C_p - net.C_b)) / net.C_fine
    amp_tol = ratio * v_ideal
    phase_tol = 2.0 * math.asin(min(1.0, 0.5 * ratio))
    return amp_tol, phase_tol


def balanced_fine_tune(net, amplitude_error=0.0, phase_error=0.0):
    """Copy of ``net`` with the fine-tune path set to cancel the imbalance, plus errors."""
    from dataclasses import replace

    q = net.V_d * (net.C_p - net.C_b)
    v = abs(q) / net.C_fine + amplitude_error
    phase = (0.0 if q >= 0 else math.pi) + phase_error
    return replace(net, V_fine=v, phase_fine=phase)


def radiative_loss_rate(omega, C_c, R, C):
    """Order-of-magnitude loss ``w^2 C_c^2 R / C`` through a coupling capacitance into ``R``."""
    return omega ** 2 * C_c ** 2 * R / C
