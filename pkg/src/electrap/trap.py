"""Classical motion of a charge in an RF quadrupole trap with a parametric drive.

The field model is an analytic multipole expansion. The potential is

    phi(r, t) = sum_i [c_rf_i cos(W_tr t) + c_dc_i + c_d_i cos(W_d t + p)] x_i^2
                - E_d . r cos(W_d t + p)

so every axis obeys an independent, linear, periodically forced equation.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.signal import find_peaks
from scipy.signal.windows import blackmanharris

from .constants import CONST, TWO_PI
from .errors import ValidationError

LAPLACE_TOL = 1e-9
ESCAPE_FACTOR = 10.0


@dataclass(frozen=True)
class TrapFieldModel:
    mass: float
    charge: float
    Omega_tr: float
    c_rf: tuple
    c_dc: tuple = (0.0, 0.0, 0.0)
    Omega_d: float = 0.0
    E_d: tuple = (0.0, 0.0, 0.0)
    c_d: tuple = (0.0, 0.0, 0.0)
    drive_phase: float = math.pi / 2

    def __post_init__(self):
        for name in ("c_rf", "c_dc", "E_d", "c_d"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ValidationError(f"{name} must be three finite numbers")
            object.__setattr__(self, name, tuple(float(x) for x in v))
        scale = max(np.max(np.abs(self.c_rf)), 1e-300)
        if abs(sum(self.c_rf)) > LAPLACE_TOL * scale:
            raise ValidationError("oscillating quadrupole violates the Laplace constraint")
        if self.mass <= 0 or self.Omega_tr <= 0:
            raise ValidationError("mass and trap frequency must be positive")

    @property
    def max_frequency(self):
        return max(self.Omega_tr, self.Omega_d)

    def mathieu(self):
        """Per-axis Mathieu parameters ``(a, q)`` of the trap field alone."""
        k = self.charge / (self.mass * self.Omega_tr ** 2)
        a = 8.0 * k * np.asarray(self.c_dc)
        q = -4.0 * k * np.asarray(self.c_rf)
        return a, q

    def secular_estimate(self):
        """Lowest-order secular frequencies ``(W/2) sqrt(a + q^2/2)``."""
        a, q = self.mathieu()
        return 0.5 * self.Omega_tr * np.sqrt(np.clip(a + 0.5 * q ** 2, 0.0, None))

    def stiffness(self, t):
        """``k(t)`` of ``x'' = -k x + f`` per axis, broadcast over ``t``."""
        t = np.asarray(t, dtype=float)[..., None]
        curv = (np.asarray(self.c_rf) * np.cos(self.Omega_tr * t) + np.asarray(self.c_dc)
                + np.asarray(self.c_d) * np.cos(self.Omega_d * t + self.drive_phase))
        return 2.0 * self.charge / self.mass * curv

    def forcing(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        return (self.charge / self.mass) * np.asarray(self.E_d) * np.cos(
            self.Omega_d * t + self.drive_phase)


def section3_model(omega=(TWO_PI * 400e6, TWO_PI * 500e6, TWO_PI * 400e6),
                   Omega_tr=TWO_PI * 7e9, Omega_d=None, A_d=350e-9, drive_phase=math.pi / 2,
                   drive_quadrupole=0.0, mass=CONST.m_e, charge=-CONST.e):
    """Trap preset for an electron with ``w_y`` the strong axis and ``w_x = w_z``.

    RF curvature follows ``(-1, 2, -1)`` and the DC curvature the same pattern,
    which satisfies the Laplace constraint for both. Curvatures are solved
    from the lowest-order secular relation. The drive is a uniform field along
    ``y`` sized for a quiver amplitude ``A_d``.
    """
    wx, wy, _ = omega
    X = (2.0 * wx / Omega_tr) ** 2
    Y = (2.0 * wy / Omega_tr) ** 2
    q_y = math.sqrt(4.0 * (Y + 2.0 * X) / 3.0)
    a_x = X - q_y ** 2 / 8.0
    k = charge / (mass * Omega_tr ** 2)
    c_rf_y = -q_y / (4.0 * k)
    c_dc_x = a_x / (8.0 * k)
    Omega_d = Omega_tr if Omega_d is None else Omega_d
    E_y = drive_field_for_amplitude(A_d, Omega_d, wy, mass, charge)
    return TrapFieldModel(
        mass=mass, charge=charge, Omega_tr=Omega_tr,
        c_rf=(-0.5 * c_rf_y, c_rf_y, -0.5 * c_rf_y),
        c_dc=(c_dc_x, -2.0 * c_dc_x, c_dc_x),
        Omega_d=Omega_d, E_d=(0.0, E_y, 0.0), c_d=(0.0, drive_quadrupole, 0.0),
        drive_phase=drive_phase,
    )


def drive_field_for_amplitude(A_d, Omega_d, omega, mass=CONST.m_e, charge=-CONST.e):
    """Uniform field amplitude (V/m) producing a quiver amplitude ``A_d``."""
    return mass * abs(Omega_d ** 2 - omega ** 2) * A_d / abs(charge)


def driven_initial_conditions(model, r_secular=(0.0, 0.0, 0.0)):
    """Position and velocity at ``t = 0`` on the harmonic steady-state drive orbit."""
    w = model.secular_estimate()
    gain = (model.charge / model.mass) * np.asarray(model.E_d) / (w ** 2 - model.Omega_d ** 2)
    r0 = gain * math.cos(model.drive_phase) + np.asarray(r_secular, dtype=float)
    v0 = -gain * model.Omega_d * math.sin(model.drive_phase)
    return r0, v0


# --------------------------------------------------------------------------
# integration


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    escaped: bool = False

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])


def _rk4_linear(stiff, force, dt, r, v, n_steps, stride, n_envelope=None):
    """RK4 for ``x'' = -k(t) x + f(t)``; coefficients precomputed on stage grids.

    After ``n_envelope`` steps the largest excursion so far becomes the
    reference; exceeding ``10x`` that reference stops the run as escaped.
    """
    nsamp = n_steps // stride + 1
    pos = np.empty((nsamp,) + r.shape)
    vel = np.empty((nsamp,) + r.shape)
    pos[0], vel[0] = r, v
    escaped = False
    envelope = np.abs(r)
    limit = None
    j = 1
    for i in range(n_steps):
        k0, km, k1 = stiff[0][i], stiff[1][i], stiff[2][i]
        f0, fm, f1 = force[0][i], force[1][i], force[2][i]
        a1 = f0 - k0 * r
        r2 = r + 0.5 * dt * v
        v2 = v + 0.5 * dt * a1
        a2 = fm - km * r2
        r3 = r + 0.5 * dt * v2
        v3 = v + 0.5 * dt * a2
        a3 = fm - km * r3
        r4 = r + dt * v3
        v4 = v + dt * a3
        a4 = f1 - k1 * r4
        r = r + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if limit is None:
            envelope = np.maximum(envelope, np.abs(r))
            if n_envelope is not None and i + 1 >= n_envelope:
                floor = max(float(np.max(envelope)), 1e-300)
                limit = ESCAPE_FACTOR * np.maximum(envelope, floor * 1e-3)
        elif np.any(np.abs(r) > limit):
            escaped = True
        if (i + 1) % stride == 0 or escaped:
            pos[j], vel[j] = r, v
            j += 1
        if escaped or not np.all(np.isfinite(r)):
            escaped = True
            break
    return pos[:j], vel[:j], escaped


def integrate_motion(model, r0, v0, t_span, step=None, stride=1):
    """Integrate ``m r'' = q E(r, t)`` with fixed-step RK4.

    Leaving ``10x`` the envelope of the first secular period (slowest axis,
    lowest-order estimate) is reported through ``escaped``.
    """
    t0, t1 = map(float, t_span)
    max_step = TWO_PI / (100.0 * model.max_frequency)
    step = max_step if step is None else float(step)
    if step > max_step * (1 + 1e-12):
        raise ValidationError(f"step {step:.3g} s exceeds 2pi/(100 W_max) = {max_step:.3g} s")
    n_steps = int(math.ceil((t1 - t0) / step - 1e-9))
    dt = (t1 - t0) / n_steps
    base = t0 + dt * np.arange(n_steps)
    stages = (base, base + 0.5 * dt, base + dt)
    stiff = [model.stiffness(s) for s in stages]
    force = [model.forcing(s) for s in stages]
    r = np.asarray(r0, dtype=float).copy()
    v = np.asarray(v0, dtype=float).copy()
    w = model.secular_estimate()
    w_min = np.min(w[w > 0]) if np.any(w > 0) else model.Omega_tr
    n_env = int(math.ceil(TWO_PI / (w_min * dt)))
    pos, vel, escaped = _rk4_linear(stiff, force, dt, r, v, n_steps, stride, n_env)
    times = t0 + dt * stride * np.arange(len(pos))
    return TrajectoryRecord(times, pos, vel, escaped)


def is_bounded(record, initial_fraction=0.05, factor=ESCAPE_FACTOR):
    """True when no sample exceeds ``factor`` times the envelope of the first stretch."""
    if record.escaped:
        return False
    n0 = max(2, int(len(record.times) * initial_fraction))
    env = np.max(np.abs(record.positions[:n0]), axis=0)
    peak = np.max(np.abs(record.positions), axis=0)
    return bool(np.all(peak <= factor * np.maximum(env, 1e-300)))


# --------------------------------------------------------------------------
# spectra


@dataclass
class SpectrumPeaks:
    frequencies: np.ndarray
    amplitudes: np.ndarray

    def near(self, freq, tol):
        """Largest amplitude within ``tol`` of ``freq`` (0 when nothing is found)."""
        sel = np.abs(self.frequencies - freq) <= tol
        return float(self.amplitudes[sel].max()) if np.any(sel) else 0.0


MIN_SAMPLES = 2 ** 14


def extract_spectrum(record, axis="y", quantity="position", threshold=1e-4):
    """Windowed DFT peaks of ``x_i`` (``position``) or ``x_i^2`` (``quadrupole``).

    Returns angular frequencies and single-sided amplitudes (m or m^2).
    """
    from .params import axis_index

    x = record.positions[:, axis_index(axis)]
    if len(x) < MIN_SAMPLES:
        raise ValidationError(f"need at least {MIN_SAMPLES} samples, got {len(x)}")
    if quantity == "quadrupole":
        x = x ** 2
    elif quantity != "position":
        raise ValidationError(f"unknown quantity {quantity!r}")
    w = blackmanharris(len(x))
    spec = np.abs(np.fft.rfft((x - np.mean(x)) * w)) * 2.0 / np.sum(w)
    freqs = TWO_PI * np.fft.rfftfreq(len(x), record.dt)
    idx, _ = find_peaks(spec, height=threshold * np.max(spec))
    return SpectrumPeaks(freqs[idx], spec[idx])


def bin_width(record):
    return TWO_PI / (len(record.times) * record.dt)


# --------------------------------------------------------------------------
# Floquet oracle and stability


def mathieu_monodromy(a, q):
    """Monodromy of ``x'' + (a - 2q cos 2s) x = 0`` over one period ``s in [0, pi]``."""

    def rhs(s, y):
        return [y[1], -(a - 2.0 * q * math.cos(2.0 * s)) * y[0]]

    cols = []
    for y0 in ([1.0, 0.0], [0.0, 1.0]):
        sol = solve_ivp(rhs, (0.0, math.pi), y0, method="DOP853", rtol=1e-12, atol=1e-14)
        cols.append(sol.y[:, -1])
    return np.array(cols).T


def floquet_exponent(a, q):
    """``(stable, beta)``; ``beta`` is the characteristic exponent in ``[0, 1]``.

    Secular frequency is ``beta * W / 2`` inside the first stability region.
    """
    half_trace = 0.5 * np.trace(mathieu_monodromy(a, q))
    if abs(half_trace) < 1.0:
        return True, math.acos(half_trace) / math.pi
    return False, float("nan")


def floquet_secular(model):
    a, q = model.mathieu()
    out = []
    for ai, qi in zip(a, q):
        stable, beta = floquet_exponent(ai, qi)
        out.append(beta * model.Omega_tr / 2 if stable else float("nan"))
    return np.array(out)


def stability_edge(a=0.0, q_lo=0.5, q_hi=1.2, tol=1e-6):
    """Bisect the Floquet criterion for the first-region edge in ``q``."""
    while q_hi - q_lo > tol:
        mid = 0.5 * (q_lo + q_hi)
        if floquet_exponent(a, mid)[0]:
            q_lo = mid
        else:
            q_hi = mid
    return 0.5 * (q_lo + q_hi)


def stability_scan(a_values, q_values, secular_periods=200, steps_per_period=100):
    """Boundedness map of the Mathieu equation over an ``(a, q)`` grid.

    Each point is integrated with RK4 over one RF period from both unit initial
    conditions; the linear recurrence then advances the trajectory period by
    period for ``secular_periods`` periods of the lowest-order secular motion.
    A point is stable when the stroboscopic trajectory stays within ``10x``
    its first secular period envelope. Returns a boolean array
    ``(len(a_values), len(q_values))``.
    """
    A, Q = np.meshgrid(np.asarray(a_values, float), np.asarray(q_values, float), indexing="ij")
    a, q = A.ravel(), Q.ravel()
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(q))):
        raise ValidationError("grid must be finite")
    h = math.pi / steps_per_period
    # state matrix columns: responses to (1,0) and (0,1)
    X = np.zeros((len(a), 2, 2))
    X[:, 0, 0] = 1.0
    X[:, 1, 1] = 1.0

    def acc(s, x):
        return -(a - 2.0 * q * math.cos(2.0 * s))[:, None] * x

    for i in range(steps_per_period):
        s = i * h
        x, v = X[:, 0], X[:, 1]
        k1x, k1v = v, acc(s, x)
        k2x, k2v = v + 0.5 * h * k1v, acc(s + 0.5 * h, x + 0.5 * h * k1x)
        k3x, k3v = v + 0.5 * h * k2v, acc(s + 0.5 * h, x + 0.5 * h * k2x)
        k4x, k4v = v + h * k3v, acc(s + h, x + h * k3x)
        X = np.stack([x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
                      v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)], axis=1)

    beta = np.clip(np.sqrt(np.clip(a + 0.5 * q ** 2, 0.0, None)), 0.01, 1.0)
    rf_per_secular = np.ceil(2.0 / beta).astype(int)
    n_periods = int(np.max(rf_per_secular)) * secular_periods
    state = np.tile(np.array([1.0, 0.0]), (len(a), 1))
    envelope = np.zeros(len(a))
    peak = np.zeros(len(a))
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, n_periods + 1):
            state = np.einsum("kij,kj->ki", X, state)
            amp = np.abs(state[:, 0])
            first = n <= rf_per_secular
            envelope = np.where(first, np.maximum(envelope, amp), envelope)
            peak = np.where(n <= rf_per_secular * secular_periods, np.maximum(peak, amp), peak)
            state = np.where(np.isfinite(state), state, np.inf)
    envelope = np.maximum(envelope, 1.0)
    stable = np.isfinite(peak) & (peak <= ESCAPE_FACTOR * envelope)
    return stable.reshape(A.shape)


# --------------------------------------------------------------------------
# drive pseudopotential


LIMIT_BUDGET = 2.5e5


def drive_pseudopotential_ratio(Omega_d, omega):
    """``U_ps / (m w^2 A_d^2) = (W_d / w)^2 / 4``."""
    if not omega > 0:
        raise ValidationError("omega must be > 0")
    return 0.25 * (Omega_d / omega) ** 2


def limiting_drive_frequency(omega, budget=LIMIT_BUDGET):
    """Drive frequency at which the ratio reaches ``budget``."""
    if not omega > 0:
        raise ValidationError("omega must be > 0")
    return 2.0 * omega * math.sqrt(budget)


def calibrate_budget(omega, Omega_limit):
    return drive_pseudopotential_ratio(Omega_limit, omega)


def simulated_pseudopotential_ratio(omega, Omega_d, A_d=350e-9, mass=CONST.m_e,
                                    charge=-CONST.e, drive_periods=200):
    """Time-averaged quiver kinetic energy over ``m w^2 A^2`` from a direct integration.

    A harmonic well at ``omega`` is driven by a uniform field at ``Omega_d``; the
    particle starts on the steady-state orbit and ``A`` is the measured amplitude.
    """
    E = drive_field_for_amplitude(A_d, Omega_d, omega, mass, charge)
    c_dc = mass * omega ** 2 / (2.0 * charge)
    model = TrapFieldModel(mass=mass, charge=charge, Omega_tr=Omega_d, c_rf=(0.0, 0.0, 0.0),
                           c_dc=(0.0, c_dc, 0.0), Omega_d=Omega_d, E_d=(0.0, E, 0.0),
                           drive_phase=0.0)
    r0 = (0.0, charge * E / mass / (omega ** 2 - Omega_d ** 2), 0.0)
    rec = integrate_motion(model, r0, (0.0, 0.0, 0.0), (0.0, drive_periods * TWO_PI / Omega_d))
    y = rec.positions[:, 1]
    vy = rec.velocities[:, 1]
    amp = 0.5 * (np.max(y) - np.min(y))
    kinetic = 0.5 * mass * np.mean(vy[:-1] ** 2)
    return kinetic / (mass * omega ** 2 * amp ** 2), amp
