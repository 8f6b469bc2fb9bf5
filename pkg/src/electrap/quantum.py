"""Truncated Fock-space operator algebra.

Operators are plain dense complex ``numpy`` arrays. States carry their
Hilbert-space layout so that embeddings and comparisons can be checked.
"""

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg as la

from .errors import InvalidComparison, InvalidDimension, InvalidEmbedding

STATE_TRACE_TOL = 1e-10
STATE_HERMITIAN_TOL = 1e-10
STATE_POSITIVITY_TOL = -1e-8


@dataclass(frozen=True)
class HilbertSpace:
    dims: tuple
    labels: tuple = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise InvalidDimension(f"subsystem dimensions must all be >= 2, got {dims}")
        labels = self.labels
        if labels is None:
            labels = tuple(f"s{i}" for i in range(len(dims)))
        labels = tuple(labels)
        if len(labels) != len(dims):
            raise InvalidDimension("one label per subsystem required")
        if len(set(labels)) != len(labels):
            raise InvalidDimension(f"labels must be unique, got {labels}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @property
    def total_dim(self):
        return int(np.prod(self.dims))

    def index(self, label):
        if isinstance(label, (int, np.integer)):
            return int(label)
        return self.labels.index(label)

    def basis_index(self, occupations):
        """Flat index of the product basis state ``|n_0, n_1, ...>``."""
        if len(occupations) != len(self.dims):
            raise InvalidDimension("one occupation per subsystem required")
        for n, d in zip(occupations, self.dims):
            if not 0 <= n < d:
                raise InvalidDimension(f"occupation {n} outside truncation {d}")
        return int(np.ravel_multi_index(tuple(occupations), self.dims))


def mode_operators(dim):
    """Return ``(a, a_dagger, n)`` for a bosonic mode truncated to ``dim`` levels."""
    if dim < 2:
        raise InvalidDimension(f"mode truncation must be >= 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T.copy(), np.diag(np.arange(dim, dtype=float)).astype(complex)


def qubit_operators():
    """Return ``(sigma_minus, sigma_plus, sigma_z)`` with basis order ``|0>=ground, |1>=excited``.

    ``sigma_z`` is +1 on the excited state, so that ``sigma_plus @ sigma_minus``
    projects on ``|1>`` just like ``a_dagger @ a`` for a two-level truncation.
    """
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    sz = np.diag([-1.0, 1.0]).astype(complex)
    return sm, sm.conj().T.copy(), sz


def embed(op, space, index):
    """Tensor ``op`` with identities on every other subsystem of ``space``."""
    index = space.index(index)
    op = np.asarray(op, dtype=complex)
    if not 0 <= index < len(space.dims):
        raise InvalidEmbedding(f"subsystem index {index} out of range")
    if op.shape != (space.dims[index],) * 2:
        raise InvalidEmbedding(
            f"operator shape {op.shape} does not match subsystem dim {space.dims[index]}"
        )
    factors = [np.eye(d, dtype=complex) for d in space.dims]
    factors[index] = op
    return reduce(np.kron, factors)


def is_hermitian(op, tol=1e-12):
    op = np.asarray(op)
    return op.shape[0] == op.shape[1] and np.max(np.abs(op - op.conj().T)) < tol


@dataclass(frozen=True)
class QuantumState:
    space: HilbertSpace
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        n = self.space.total_dim
        if rho.shape != (n, n):
            raise InvalidDimension(f"density matrix shape {rho.shape} != ({n}, {n})")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    def validate(self, trace_tol=STATE_TRACE_TOL, herm_tol=STATE_HERMITIAN_TOL,
                 min_eig=STATE_POSITIVITY_TOL):
        """Raise ``ValueError`` unless the matrix is a valid density matrix."""
        tr = np.trace(self.rho)
        if abs(tr - 1) > trace_tol:
            raise ValueError(f"trace {tr} differs from 1")
        if np.max(np.abs(self.rho - self.rho.conj().T)) > herm_tol:
            raise ValueError("density matrix not Hermitian")
        if self.min_eigenvalue() < min_eig:
            raise ValueError("density matrix has negative eigenvalues")
        return self

    def min_eigenvalue(self):
        herm = 0.5 * (self.rho + self.rho.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def purity(self):
        return float(np.real(np.trace(self.rho @ self.rho)))

    def reduced(self, keep):
        """Partial trace onto the subsystems listed in ``keep``."""
        keep = sorted(self.space.index(k) for k in keep)
        dims = self.space.dims
        n = len(dims)
        t = self.rho.reshape(dims + dims)
        traced = [i for i in range(n) if i not in keep]
        # trace pairs from the highest axis down so lower axis numbers stay valid
        for i in sorted(traced, reverse=True):
            m = t.ndim // 2
            t = np.trace(t, axis1=i, axis2=i + m)
        kd = tuple(dims[i] for i in keep)
        labels = tuple(self.space.labels[i] for i in keep)
        d = int(np.prod(kd))
        return QuantumState(HilbertSpace(kd, labels), t.reshape(d, d))


def ket(space, occupations):
    """Product basis ket as a 1D complex vector."""
    v = np.zeros(space.total_dim, dtype=complex)
    v[space.basis_index(occupations)] = 1.0
    return v


def pure_state(space, psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return QuantumState(space, np.outer(psi, psi.conj()))


def basis_state(space, occupations):
    return pure_state(space, ket(space, occupations))


def thermal_populations(nbar, dim):
    """Geometric (Bose) populations truncated to ``dim`` levels and renormalised."""
    if nbar == 0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    r = nbar / (1.0 + nbar)
    p = r ** np.arange(dim)
    return p / p.sum()


def thermal_state(nbar, dim, label="mode"):
    return QuantumState(HilbertSpace((dim,), (label,)), np.diag(thermal_populations(nbar, dim)))


def product_state(*states):
    """Tensor product of single- or multi-subsystem states."""
    dims, labels = (), ()
    rho = np.eye(1, dtype=complex)
    for s in states:
        dims += s.space.dims
        labels += s.space.labels
        rho = np.kron(rho, s.rho)
    return QuantumState(HilbertSpace(dims, labels), rho)


def expectation(state, op):
    op = np.asarray(op)
    if op.shape != state.rho.shape:
        raise InvalidDimension(f"operator shape {op.shape} != state shape {state.rho.shape}")
    return complex(np.trace(state.rho @ op))


def _purity_rank_one(rho, tol=1e-10):
    return abs(np.real(np.trace(rho @ rho)) - 1.0) < tol


def state_fidelity(state, target):
    """Fidelity in [0, 1].

    Pure targets use the overlap ``<psi|rho|psi>``; otherwise the squared
    Uhlmann fidelity ``(tr sqrt(sqrt(s) r sqrt(s)))^2``.
    """
    if state.space.dims != target.space.dims:
        raise InvalidComparison(
            f"states live on different spaces {state.space.dims} and {target.space.dims}"
        )
    if _purity_rank_one(target.rho):
        # tr(rho |psi><psi|) = <psi|rho|psi>
        f = np.real(np.trace(state.rho @ target.rho))
    else:
        s = la.sqrtm(target.rho)
        f = np.real(np.trace(la.sqrtm(s @ state.rho @ s))) ** 2
    return float(min(1.0, max(0.0, f)))
