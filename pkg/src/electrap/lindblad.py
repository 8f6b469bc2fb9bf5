"""Lindblad master-equation and Gaussian second-moment solvers.

Hamiltonians are expressed as ``H/hbar`` in rad/s. A model holds static
operators, each multiplied by a scalar envelope of time; envelopes must
accept numpy arrays so values at every Runge-Kutta substage can be
computed up front (exactly, not interpolated).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.integrate import solve_ivp

from .errors import (
    IntegrationDiverged,
    InvalidDimension,
    PositivityViolation,
    UnphysicalDephasing,
    ValidationError,
)
from .quantum import HilbertSpace, QuantumState, embed, mode_operators, qubit_operators

TRACE_TOL = 1e-6
POSITIVITY_TOL = -1e-6
HEATING_MODELS = ("symmetric", "raising")


def constant(value=1.0):
    """Time-independent envelope."""
    value = complex(value)

    def env(t):
        return np.full(np.shape(t), value, dtype=complex)

    env.constant = value
    return env


def rotating(freq, amplitude=1.0):
    """Envelope ``amplitude * exp(i*freq*t)``."""

    def env(t):
        return amplitude * np.exp(1j * freq * np.asarray(t, dtype=float))

    return env


@dataclass
class LindbladModel:
    space: HilbertSpace
    hamiltonian_terms: list
    collapse_ops: list = field(default_factory=list)

    def __post_init__(self):
        n = self.space.total_dim
        terms = []
        for op, env in self.hamiltonian_terms:
            op = np.asarray(op, dtype=complex)
            if op.shape != (n, n):
                raise InvalidDimension(f"Hamiltonian term shape {op.shape} != ({n}, {n})")
            terms.append((op, constant(env) if np.isscalar(env) else env))
        self.hamiltonian_terms = terms
        cops = []
        for op, rate in self.collapse_ops:
            op = np.asarray(op, dtype=complex)
            if op.shape != (n, n):
                raise InvalidDimension(f"collapse operator shape {op.shape} != ({n}, {n})")
            if not rate >= 0:
                raise ValidationError(f"collapse rate must be >= 0, got {rate}")
            cops.append((op, float(rate)))
        self.collapse_ops = cops

    def hamiltonian(self, t):
        n = self.space.total_dim
        h = np.zeros((n, n), dtype=complex)
        for op, env in self.hamiltonian_terms:
            h += complex(env(np.asarray(t))) * op
        return h

    def check_hermitian(self, times, tol=1e-10):
        for t in np.atleast_1d(times):
            h = self.hamiltonian(t)
            scale = max(1.0, float(np.max(np.abs(h))))
            if np.max(np.abs(h - h.conj().T)) > tol * scale:
                raise ValidationError(f"total Hamiltonian not Hermitian at t={t}")

    def jump_operators(self):
        """Collapse operators scaled by the square root of their rates."""
        n = self.space.total_dim
        ops = [np.sqrt(rate) * op for op, rate in self.collapse_ops if rate > 0]
        if not ops:
            return np.zeros((0, n, n), dtype=complex)
        return np.array(ops)


@dataclass
class EvolutionConfig:
    t_start: float
    t_end: float
    step: float
    method: str = "rk4-fixed"
    checkpoint_times: tuple = ()
    observables: tuple = ()
    sample_stride: int = 1
    rtol: float = 1e-9
    atol: float = 1e-11

    def __post_init__(self):
        if not self.step > 0:
            raise ValidationError("step must be > 0")
        if not self.t_end > self.t_start:
            raise ValidationError("t_end must exceed t_start")
        if self.method not in ("rk4-fixed", "rk45-adaptive"):
            raise ValidationError(f"unknown method {self.method!r}")
        for t in self.checkpoint_times:
            if not self.t_start <= t <= self.t_end:
                raise ValidationError(f"checkpoint {t} outside the integration span")


@dataclass
class Trajectory:
    times: np.ndarray
    observable_records: np.ndarray
    checkpoint_times: tuple
    checkpoint_states: list

    def state_at(self, t):
        for tc, s in zip(self.checkpoint_times, self.checkpoint_states):
            if np.isclose(tc, t, rtol=1e-12, atol=1e-18):
                return s
        raise KeyError(f"no checkpoint stored at t={t}")


def default_step(max_freq_hz, tau):
    """Fixed RK4 step: at most 1/50 of the fastest period and ``tau/5000``."""
    candidates = [tau / 5000.0]
    if max_freq_hz > 0:
        candidates.append(1.0 / (50.0 * max_freq_hz))
    return min(candidates)


def time_grid(t_start, t_end, step, checkpoints=()):
    """Uniform sub-grid between consecutive required times.

    Every checkpoint lands on a grid point, and no interval exceeds ``step``.
    """
    knots = sorted({float(t_start), float(t_end), *map(float, checkpoints)})
    pieces = [np.array([knots[0]])]
    for a, b in zip(knots[:-1], knots[1:]):
        if b - a <= 0:
            continue
        n = int(np.ceil((b - a) / step - 1e-9))
        piece = a + (b - a) * np.arange(1, n + 1) / n
        piece[-1] = b
        pieces.append(piece)
    return np.concatenate(pieces)


def _envelope_table(model, times):
    """Envelope values at (t, t+h/2, t+h) for every step, shape (terms, steps, 3)."""
    t0 = times[:-1]
    h = np.diff(times)
    stages = np.stack([t0, t0 + 0.5 * h, times[1:]], axis=-1)
    if not model.hamiltonian_terms:
        return np.zeros((0,) + stages.shape, dtype=complex)
    return np.array([np.broadcast_to(env(stages), stages.shape) for _, env in model.hamiltonian_terms])


def _is_pure(rho, tol=1e-12):
    return abs(np.real(np.trace(rho @ rho)) - 1.0) < tol


def evolve_lindblad(model, rho0, config):
    """Integrate the master equation and record observables on the time grid."""
    if rho0.space.dims != model.space.dims:
        raise InvalidDimension("initial state and model live on different spaces")
    times = time_grid(config.t_start, config.t_end, config.step, config.checkpoint_times)
    model.check_hermitian([times[0], times[len(times) // 2], times[-1]])
    obs = np.array([np.asarray(o, dtype=complex) for o in config.observables])
    jumps = model.jump_operators()

    if config.method == "rk45-adaptive":
        states = _integrate_adaptive(model, jumps, rho0.rho, times, config)
        return _finish(model, times, states, obs, config)

    if len(jumps) == 0 and _is_pure(rho0.rho):
        w, v = np.linalg.eigh(rho0.rho)
        states = _rk4_pure(model, v[:, -1], times)
    else:
        states = _rk4_density(model, jumps, np.array(rho0.rho), times)
    return _finish(model, times, states, obs, config)


def _stacked_terms(model):
    n = model.space.total_dim
    return np.array([op for op, _ in model.hamiltonian_terms]).reshape(-1, n, n)


def _rk4_density(model, jumps, rho, times):
    """Yield the density matrix at every grid time (fixed-step classical RK4)."""
    hs = _stacked_terms(model)
    envs = _envelope_table(model, times)
    jumps_dag = np.conj(np.swapaxes(jumps, 1, 2))
    damp = -0.5 * np.einsum("kji,kjl->il", jumps.conj(), jumps) if len(jumps) else 0.0

    def rhs(coeffs, r):
        k = -1j * np.tensordot(coeffs, hs, axes=1) + damp
        x = k @ r
        out = x + x.conj().T
        if len(jumps):
            out += (jumps @ r @ jumps_dag).sum(axis=0)
        return out

    yield rho
    for i, h in enumerate(np.diff(times)):
        c = envs[:, i, :]
        k1 = rhs(c[:, 0], rho)
        k2 = rhs(c[:, 1], rho + 0.5 * h * k1)
        k3 = rhs(c[:, 1], rho + 0.5 * h * k2)
        k4 = rhs(c[:, 2], rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        yield rho


def _rk4_pure(model, psi, times):
    """Schrodinger-equation RK4 on the same grid; yields density matrices lazily."""
    hs = _stacked_terms(model)
    envs = _envelope_table(model, times)

    def rhs(coeffs, v):
        return -1j * (np.tensordot(coeffs, hs, axes=1) @ v)

    yield _PureRho(psi)
    for i, h in enumerate(np.diff(times)):
        c = envs[:, i, :]
        k1 = rhs(c[:, 0], psi)
        k2 = rhs(c[:, 1], psi + 0.5 * h * k1)
        k3 = rhs(c[:, 1], psi + 0.5 * h * k2)
        k4 = rhs(c[:, 2], psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        yield _PureRho(psi)


class _PureRho:
    """Deferred ``|psi><psi|`` so that long unitary runs avoid building dim^2 arrays."""

    def __init__(self, psi):
        self.psi = psi

    def trace(self):
        return np.vdot(self.psi, self.psi)

    def expect(self, obs):
        return np.einsum("i,kij,j->k", self.psi.conj(), obs, self.psi)

    def matrix(self):
        return np.outer(self.psi, self.psi.conj())


def _integrate_adaptive(model, jumps, rho, times, config):
    n = model.space.total_dim
    jumps_dag = np.conj(np.swapaxes(jumps, 1, 2))
    damp = -0.5 * np.einsum("kji,kjl->il", jumps.conj(), jumps) if len(jumps) else 0.0

    def rhs(t, y):
        r = y.reshape(n, n)
        k = -1j * model.hamiltonian(t) + damp
        x = k @ r
        out = x + x.conj().T
        if len(jumps):
            out += (jumps @ r @ jumps_dag).sum(axis=0)
        return out.ravel()

    sol = solve_ivp(rhs, (times[0], times[-1]), rho.ravel(), method="RK45", t_eval=times,
                    rtol=config.rtol, atol=config.atol)
    if not sol.success:
        raise IntegrationDiverged(sol.message)
    for i in range(sol.y.shape[1]):
        yield sol.y[:, i].reshape(n, n)


def _finish(model, times, states, obs, config):
    checkpoints = sorted(float(t) for t in config.checkpoint_times)
    idx = {int(np.argmin(np.abs(times - t))): t for t in checkpoints}
    stride = max(1, int(config.sample_stride))
    keep_t, records, ck_states, ck_times = [], [], [], []
    last = len(times) - 1
    for i, rho in enumerate(states):
        pure = isinstance(rho, _PureRho)
        tr = rho.trace() if pure else np.trace(rho)
        if not np.isfinite(tr) or abs(tr - 1.0) > TRACE_TOL:
            raise IntegrationDiverged(f"trace drifted to {tr} at t={times[i]}")
        if i % stride == 0 or i == last:
            keep_t.append(times[i])
            if len(obs):
                records.append(rho.expect(obs) if pure else np.einsum("ij,kji->k", rho, obs))
        if i in idx:
            mat = rho.matrix() if pure else rho
            state = QuantumState(model.space, 0.5 * (mat + mat.conj().T))
            if state.min_eigenvalue() < POSITIVITY_TOL:
                raise PositivityViolation(f"negative eigenvalue at checkpoint t={times[i]}")
            ck_states.append(state)
            ck_times.append(idx[i])
    rec = np.array(records) if records else np.zeros((len(keep_t), 0), dtype=complex)
    return Trajectory(np.array(keep_t), rec, tuple(ck_times), ck_states)


# --------------------------------------------------------------------------
# decoherence channels


@dataclass(frozen=True)
class QubitDecoherence:
    t1: float
    t2: float


@dataclass(frozen=True)
class ResonatorDecoherence:
    t1: float
    bath_nbar: float = 0.0


@dataclass(frozen=True)
class MotionalHeating:
    """Heating at ``rate`` quanta/s.

    ``symmetric``: raising and lowering jumps at equal rate (infinite-temperature
    bath, d<n>/dt = rate for every state). ``raising``: raising jumps only, so
    ``rate`` is the transition rate out of the motional ground state.
    """

    rate: float
    model: str = "symmetric"


def dephasing_rate(t1, t2):
    """Pure dephasing rate ``1/t2 - 1/(2 t1)``."""
    if t2 > 2 * t1 * (1 + 1e-12):
        raise UnphysicalDephasing(f"t2={t2} exceeds 2*t1={2 * t1}")
    return max(0.0, 1.0 / t2 - 1.0 / (2.0 * t1))


def channel_ops(spec, dim):
    """Local (unembedded) collapse operators and rates for one subsystem."""
    if isinstance(spec, QubitDecoherence):
        if dim != 2:
            raise InvalidDimension("qubit decoherence needs a two-level subsystem")
        sm, _, sz = qubit_operators()
        return [(sm, 1.0 / spec.t1), (sz, 0.5 * dephasing_rate(spec.t1, spec.t2))]
    a, ad, _ = mode_operators(dim)
    if isinstance(spec, ResonatorDecoherence):
        out = [(a, (spec.bath_nbar + 1.0) / spec.t1)]
        if spec.bath_nbar > 0:
            out.append((ad, spec.bath_nbar / spec.t1))
        return out
    if isinstance(spec, MotionalHeating):
        if spec.model not in HEATING_MODELS:
            raise ValidationError(f"unknown heating model {spec.model!r}")
        if spec.rate < 0:
            raise ValidationError("heating rate must be >= 0")
        out = [(ad, float(spec.rate))]
        if spec.model == "symmetric":
            out.append((a, float(spec.rate)))
        return out
    raise ValidationError(f"unsupported decoherence spec {spec!r}")


def build_collapse_set(space, specs):
    """Embed the channels in ``specs`` (mapping subsystem label -> spec) into ``space``."""
    out = []
    for label, spec in specs.items():
        if spec is None:
            continue
        i = space.index(label)
        for op, rate in channel_ops(spec, space.dims[i]):
            if rate > 0:
                out.append((embed(op, space, i), rate))
    return out


# --------------------------------------------------------------------------
# Gaussian (second-moment) solver


@dataclass
class GaussianModel:
    """Linear, excitation-conserving dynamics of ``N_ij = <a_i^dag a_j>``.

    ``coupling`` is the Hermitian matrix ``M`` of ``H/hbar = a^dag M a``.
    Loss drains into a bath of occupation ``bath_occupations``; heating follows
    the same conventions as :class:`MotionalHeating`.
    """

    coupling: np.ndarray
    loss_rates: np.ndarray
    heating_rates: np.ndarray
    initial_occupations: np.ndarray
    bath_occupations: np.ndarray = None
    heating_model: str = "symmetric"

    def __post_init__(self):
        self.coupling = np.atleast_2d(np.asarray(self.coupling, dtype=complex))
        m = self.coupling.shape[0]
        if self.coupling.shape != (m, m) or not np.allclose(self.coupling, self.coupling.conj().T,
                                                            atol=0, rtol=1e-12):
            raise ValidationError("coupling matrix must be square and Hermitian")
        for name in ("loss_rates", "heating_rates", "initial_occupations", "bath_occupations"):
            v = getattr(self, name)
            v = np.zeros(m) if v is None else np.broadcast_to(np.asarray(v, dtype=float), (m,)).copy()
            if np.any(v < 0):
                raise ValidationError(f"{name} must be >= 0")
            setattr(self, name, v)
        if self.heating_model not in HEATING_MODELS:
            raise ValidationError(f"unknown heating model {self.heating_model!r}")

    @property
    def mode_count(self):
        return self.coupling.shape[0]

    def rates(self):
        """Per-mode lowering and raising jump rates."""
        down = self.loss_rates * (self.bath_occupations + 1.0)
        up = self.loss_rates * self.bath_occupations + self.heating_rates
        if self.heating_model == "symmetric":
            down = down + self.heating_rates
        return down, up

    def generator(self):
        """Affine generator on row-major ``vec(N)``: d vec/dt = L vec + d."""
        m = self.mode_count
        down, up = self.rates()
        drift = -1j * self.coupling - 0.5 * np.diag(down - up)
        eye = np.eye(m)
        lin = np.kron(drift.conj(), eye) + np.kron(eye, drift)
        return lin, np.diag(up).astype(complex).ravel()


@dataclass
class GaussianTrajectory:
    times: np.ndarray
    occupations: np.ndarray
    correlations: np.ndarray

    def ground_state_fidelity(self, mode, index=-1):
        """Vacuum probability of a phase-insensitive Gaussian mode, ``1/(1+n)``."""
        return float(1.0 / (1.0 + self.occupations[index, mode]))


def evolve_gaussian(model, t_end, samples=201):
    """Exact propagation of the second moments on a uniform grid of ``samples`` points."""
    if not t_end > 0:
        raise ValidationError("t_end must be > 0")
    m = model.mode_count
    lin, src = model.generator()
    size = m * m
    aug = np.zeros((size + 1, size + 1), dtype=complex)
    aug[:size, :size] = lin
    aug[:size, size] = src
    times = np.linspace(0.0, t_end, samples)
    prop = la.expm(aug * (times[1] - times[0]))
    v = np.concatenate([np.diag(model.initial_occupations).astype(complex).ravel(), [1.0]])
    occ = np.empty((samples, m))
    for i in range(samples):
        if i:
            v = prop @ v
        occ[i] = np.real(np.diag(v[:size].reshape(m, m)))
    return GaussianTrajectory(times, occ, v[:size].reshape(m, m))
