"""Coupling rates and Hamiltonians for electron, resonator, transmon and spin.

All Hamiltonians are ``H/hbar`` in rad/s, in the interaction picture.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONST
from .errors import InvalidRegime, ValidationError
from .lindblad import (
    EvolutionConfig,
    GaussianModel,
    LindbladModel,
    MotionalHeating,
    QubitDecoherence,
    ResonatorDecoherence,
    build_collapse_set,
    constant,
    default_step,
    evolve_lindblad,
    rotating,
)
from .params import RateCard, axis_index
from .quantum import (
    HilbertSpace,
    basis_state,
    embed,
    ket,
    mode_operators,
    pure_state,
    qubit_operators,
    state_fidelity,
)


def zero_point_amplitudes(electron, resonator, axis="y"):
    """Position and charge zero-point amplitudes ``(y0, q0)``."""
    omega = electron.secular(axis)
    y0 = math.sqrt(CONST.hbar / (2.0 * electron.mass * omega))
    q0 = math.sqrt(CONST.hbar / (2.0 * resonator.Z))
    return y0, q0


def parametric_rate(electron, resonator, drive, geometry, axis="y", calibration=1.0):
    """Parametric coupling ``hbar g = 2 e q0 A_d y0 / (C D2^2)``; ``g_p = g/2``.

    ``calibration`` multiplies the closed form and absorbs amplitude and
    capacitance conventions that the closed form leaves open.
    """
    if drive.A_d < 0:
        raise ValidationError("A_d must be >= 0")
    y0, q0 = zero_point_amplitudes(electron, resonator, axis)
    d2 = geometry.D2[axis_index(axis)]
    hg = 2.0 * CONST.e * q0 * drive.A_d * y0 / (resonator.C * d2 ** 2)
    return RateCard(y0=y0, q0=q0, g=calibration * hg / CONST.hbar)


def magic_detuning(n, g_p):
    """Bus detuning ``delta_n`` and transfer time for the ``n``-th magic condition."""
    if n < 0 or int(n) != n:
        raise ValidationError(f"magic index must be a non-negative integer, got {n}")
    if not g_p > 0:
        raise ValidationError("g_p must be > 0")
    delta = math.sqrt(8.0 * n * n / (2 * n + 1)) * g_p
    tau = (math.pi / g_p) * math.sqrt((2 * n + 1) / 2.0)
    return delta, tau


# --------------------------------------------------------------------------
# Hamiltonian builders


ER_MODES = ("rwa-beamsplitter", "rwa-squeezer", "full-time-dependent")


def build_er_hamiltonian(g, space, mode, electron="y", resonator="phi",
                         Omega=None, omega_y=None, Omega_d=None):
    """Electron-resonator parametric Hamiltonian terms.

    ``g`` is the full rate; the resonant exchange rate is ``g/2``. The full
    mode keeps all four products with the ``cos(Omega_d t)`` pump and its
    phase factors, and needs the three frequencies.
    """
    if mode not in ER_MODES:
        raise ValidationError(f"unknown mode {mode!r}")
    if isinstance(g, RateCard):
        g = g.g
    a_y = embed(mode_operators(space.dims[space.index(electron)])[0], space, electron)
    a_p = embed(mode_operators(space.dims[space.index(resonator)])[0], space, resonator)
    bs = a_p.conj().T @ a_y
    sq = a_p.conj().T @ a_y.conj().T
    freqs = (Omega, omega_y, Omega_d)
    if mode == "full-time-dependent" and None in freqs:
        raise ValidationError("full-time-dependent mode needs Omega, omega_y and Omega_d")

    if None not in freqs:
        _check_regime(mode, Omega, omega_y, Omega_d, g)

    if mode == "rwa-beamsplitter":
        v = 0.5 * g * bs
        return [(v + v.conj().T, constant())]
    if mode == "rwa-squeezer":
        v = 0.5 * g * sq
        return [(v + v.conj().T, constant())]
    terms = []
    for op, w in ((bs, Omega - omega_y), (sq, Omega + omega_y)):
        for sign in (1.0, -1.0):
            f = w + sign * Omega_d
            terms.append((0.5 * g * op, rotating(f)))
            terms.append((0.5 * g * op.conj().T, rotating(-f)))
    return terms


def _check_regime(mode, Omega, omega_y, Omega_d, g):
    tol = max(10.0 * abs(g), 1e-9 * Omega)
    bs_ok = abs(Omega_d - (Omega - omega_y)) <= tol
    sq_ok = abs(Omega_d - (Omega + omega_y)) <= tol
    if mode == "rwa-beamsplitter" and not bs_ok:
        raise InvalidRegime("beam-splitter regime needs Omega_d = Omega - omega_y")
    if mode == "rwa-squeezer" and not sq_ok:
        raise InvalidRegime("squeezing regime needs Omega_d = Omega + omega_y")
    if mode == "full-time-dependent" and not (bs_ok or sq_ok):
        raise InvalidRegime("drive frequency matches neither Omega - omega_y nor Omega + omega_y")


CHAIN_KINDS = ("electron-transmon", "electron-electron")


def chain_space(kind, n_motion=5, n_bus=5):
    if kind not in CHAIN_KINDS:
        raise ValidationError(f"unknown chain kind {kind!r}")
    end = 2 if kind == "electron-transmon" else n_motion
    label = "transmon" if kind == "electron-transmon" else "electron2"
    return HilbertSpace((n_motion, n_bus, end), ("electron", "bus", label))


def _lowering(space, index):
    d = space.dims[index]
    return embed(qubit_operators()[0] if d == 2 and space.labels[index] == "transmon"
                 else mode_operators(d)[0], space, index)


def build_chain_hamiltonian(space, g_p, g_end, delta):
    """Electron - bus - (transmon | electron) chain with the bus detuned by ``delta``.

    ``g_p`` couples electron and bus, ``g_end`` couples bus and end system
    (``G_lt`` for a transmon). Both links carry ``exp(+-i delta t)``.
    """
    a = _lowering(space, 0)
    b = _lowering(space, 1)
    c = _lowering(space, 2)
    v = g_p * (b.conj().T @ a) + g_end * (b.conj().T @ c)
    return [(v, rotating(delta)), (v.conj().T, rotating(-delta))]


def number_operator(space, index):
    low = _lowering(space, index)
    return low.conj().T @ low


# --------------------------------------------------------------------------
# chain state transfer


@dataclass
class ChainResult:
    kind: str
    n: int
    delta: float
    tau_swap: float
    swap_fidelity: float
    bell_fidelity: float
    trajectory: object
    space: HilbertSpace

    def populations(self):
        """Columns: time, electron, bus, end-system excitation (real parts)."""
        return np.column_stack([self.trajectory.times, np.real(self.trajectory.observable_records)])


def bell_target(space):
    """(|0,1> - i|1,0>)/sqrt(2) for (electron, end system) with the bus empty."""
    psi = ket(space, (0, 0, 1)) - 1j * ket(space, (1, 0, 0))
    return pure_state(space, psi)


def simulate_chain(kind, n, g_p, g_end=None, heating=8100.0, heating_model="raising",
                   bus_t1=45e-6, transmon_t1=70e-6, transmon_t2=92e-6, n_motion=5, n_bus=5,
                   delta=None, duration=None, step=None, lossless=False, sample_stride=1):
    """State transfer ``|1,0,0> -> |0,0,1>`` through a detuned bus.

    Returns swap fidelity at ``duration`` (default the magic ``tau_swap``)
    and Bell fidelity at half that time.
    """
    space = chain_space(kind, n_motion, n_bus)
    g_end = g_p if g_end is None else g_end
    delta_n, tau = magic_detuning(n, g_p)
    delta = delta_n if delta is None else delta
    duration = tau if duration is None else duration
    terms = build_chain_hamiltonian(space, g_p, g_end, delta)
    specs = {}
    if not lossless:
        specs["electron"] = MotionalHeating(heating, heating_model)
        specs["bus"] = ResonatorDecoherence(bus_t1)
        if kind == "electron-transmon":
            specs["transmon"] = QubitDecoherence(transmon_t1, transmon_t2)
        else:
            specs["electron2"] = MotionalHeating(heating, heating_model)
    model = LindbladModel(space, terms, build_collapse_set(space, specs))
    if step is None:
        step = default_step(abs(delta) / (2 * math.pi), duration)
    obs = [number_operator(space, i) for i in range(3)]
    cfg = EvolutionConfig(0.0, duration, step, checkpoint_times=(duration / 2, duration),
                          observables=obs, sample_stride=sample_stride)
    traj = evolve_lindblad(model, basis_state(space, (1, 0, 0)), cfg)
    swap = state_fidelity(traj.state_at(duration), basis_state(space, (0, 0, 1)))
    bell = state_fidelity(traj.state_at(duration / 2), bell_target(space))
    return ChainResult(kind, n, delta, duration, swap, bell, traj, space)


def simulate_exchange(g_p, duration, mode="rwa-beamsplitter", n_levels=4, step=None,
                      Omega=None, omega_y=None, Omega_d=None, initial=(1, 0), samples=2001):
    """Lossless electron-resonator dynamics from ``|n_y, n_phi> = initial``.

    Returns the trajectory with observables ``<n_y>`` and ``<n_phi>``.
    """
    space = HilbertSpace((n_levels, n_levels), ("y", "phi"))
    terms = build_er_hamiltonian(2.0 * g_p, space, mode, Omega=Omega, omega_y=omega_y,
                                 Omega_d=Omega_d)
    model = LindbladModel(space, terms)
    if step is None:
        fmax = 0.0
        if mode == "full-time-dependent":
            fmax = (Omega + omega_y + Omega_d) / (2 * math.pi)
        step = default_step(fmax, duration)
    n_steps = int(np.ceil(duration / step))
    stride = max(1, n_steps // (samples - 1))
    obs = [number_operator(space, 0), number_operator(space, 1)]
    cfg = EvolutionConfig(0.0, duration, step, observables=obs, sample_stride=stride,
                          checkpoint_times=(duration,))
    return evolve_lindblad(model, basis_state(space, initial), cfg)


def cooling_model(g_p, n_electron, heating=8100.0, resonator_t1=45e-6, resonator_nbar=0.0,
                  heating_model="symmetric"):
    """Second-moment model of a thermal electron swapped into a cold resonator.

    Modes are ordered (electron, resonator) with resonant exchange at ``g_p``.
    """
    coupling = np.array([[0.0, g_p], [g_p, 0.0]])
    return GaussianModel(
        coupling=coupling,
        loss_rates=[0.0, 1.0 / resonator_t1],
        heating_rates=[heating, 0.0],
        initial_occupations=[n_electron, resonator_nbar],
        bath_occupations=[0.0, resonator_nbar],
        heating_model=heating_model,
    )


def cooling_residual_estimate(g_p, n_electron, heating, t):
    """Lowest-order residual ``n cos^2(g_p t) + heating t / 2`` for a lossless resonator."""
    return n_electron * math.cos(g_p * t) ** 2 + 0.5 * heating * t


# --------------------------------------------------------------------------
# spin-motion coupling


@dataclass(frozen=True)
class SpinMotionRate:
    gradient: float
    rabi_rate: float
    drive_frequency: float

    @property
    def sideband_coupling(self):
        """Rotating-wave exchange rate ``rabi_rate/2`` for an oscillating gradient."""
        return 0.5 * self.rabi_rate


def coil_pair_gradient(radius, current, half_spacing=None):
    """On-axis gradient (T/m) at the centre of an anti-Helmholtz loop pair."""
    d = 0.5 * radius if half_spacing is None else half_spacing
    return 3.0 * CONST.mu0 * current * radius ** 2 * d / (radius ** 2 + d ** 2) ** 2.5


def spin_motion_rate(radius, current, electron, axis="y"):
    if radius <= 0 or current < 0:
        raise ValidationError("coil radius must be > 0 and current >= 0")
    grad = coil_pair_gradient(radius, current)
    omega = electron.secular(axis)
    y0 = math.sqrt(CONST.hbar / (2.0 * electron.mass * omega))
    rabi = CONST.mu_B * grad * y0 / CONST.hbar
    return SpinMotionRate(grad, rabi, omega - electron.omega_s)


@dataclass
class SpinMapResult:
    map_time: float
    fidelity: float
    trajectory: object


def spin_motion_map_sim(coupling, heating=8100.0, heating_model="raising", duration=None,
                        n_motion=4, step=None):
    """Red-sideband transfer ``|1, down> -> |0, up>`` under ``H = g (s+ a + a^dag s-)``.

    ``coupling`` is the exchange rate ``g`` (rad/s); the full map takes
    ``pi / (2 g)``. For a Rabi rate computed by :func:`spin_motion_rate` pass
    its ``sideband_coupling``.
    """
    if not coupling > 0:
        raise ValidationError("coupling must be > 0")
    space = HilbertSpace((n_motion, 2), ("motion", "spin"))
    a = embed(mode_operators(n_motion)[0], space, 0)
    sm = embed(qubit_operators()[0], space, 1)
    v = coupling * (sm.conj().T @ a)
    map_time = math.pi / (2.0 * coupling)
    duration = map_time if duration is None else duration
    cops = build_collapse_set(space, {"motion": MotionalHeating(heating, heating_model)})
    model = LindbladModel(space, [(v + v.conj().T, constant())], cops)
    if step is None:
        step = default_step(0.0, duration)
    obs = [number_operator(space, 0), sm.conj().T @ sm]
    cfg = EvolutionConfig(0.0, duration, step, checkpoint_times=(duration,), observables=obs)
    traj = evolve_lindblad(model, basis_state(space, (1, 0)), cfg)
    fid = state_fidelity(traj.state_at(duration), basis_state(space, (0, 1)))
    return SpinMapResult(duration, fid, traj)


def spin_coherence(S_B, one_sided=True):
    """Spin T2 (s) for white magnetic noise of power spectral density ``S_B`` (T^2/Hz).

    A one-sided density is halved before applying ``Gamma_2 = gamma^2 S/2``.
    Returns ``inf`` for zero noise.
    """
    if S_B < 0:
        raise ValidationError("S_B must be >= 0")
    if S_B == 0:
        return math.inf
    gamma = CONST.g_e * CONST.mu_B / CONST.hbar
    s2 = 0.5 * S_B if one_sided else S_B
    return 1.0 / (0.5 * gamma ** 2 * s2)
