"""Master-equation and second-moment solvers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from electrap.errors import IntegrationDiverged, UnphysicalDephasing, ValidationError
from electrap.lindblad import (
    EvolutionConfig,
    GaussianModel,
    LindbladModel,
    MotionalHeating,
    QubitDecoherence,
    ResonatorDecoherence,
    build_collapse_set,
    channel_ops,
    dephasing_rate,
    evolve_gaussian,
    evolve_lindblad,
    rotating,
    time_grid,
)
from electrap.quantum import (
    HilbertSpace,
    QuantumState,
    basis_state,
    embed,
    mode_operators,
    product_state,
    thermal_populations,
    thermal_state,
)

TWO_PI = 2 * math.pi


def _decay(step, t1=1.0, t_end=3.0, dim=2):
    space = HilbertSpace((dim,))
    a, _, n = mode_operators(dim)
    model = LindbladModel(space, [], [(a, 1.0 / t1)])
    cfg = EvolutionConfig(0.0, t_end, step, observables=(n,))
    return evolve_lindblad(model, basis_state(space, (1,)), cfg)


def test_analytic_decay():
    traj = _decay(0.01, t1=1.0)
    assert np.allclose(traj.observable_records[:, 0].real, np.exp(-traj.times), atol=1e-6)


def test_rk4_fourth_order():
    exact = math.exp(-3.0)
    e1 = abs(_decay(0.2).observable_records[-1, 0].real - exact)
    e2 = abs(_decay(0.1).observable_records[-1, 0].real - exact)
    assert 13.0 < e1 / e2 < 19.0


def test_rabi_exchange():
    g = TWO_PI * 1e6
    space = HilbertSpace((2, 2))
    a = embed(mode_operators(2)[0], space, 0)
    b = embed(mode_operators(2)[0], space, 1)
    h = g * (a.conj().T @ b + b.conj().T @ a)
    model = LindbladModel(space, [(h, 1.0)])
    proj = np.diag(basis_state(space, (1, 0)).rho.diagonal())
    cfg = EvolutionConfig(0.0, 1e-6, 1e-10, observables=(proj,), sample_stride=10)
    traj = evolve_lindblad(model, basis_state(space, (1, 0)), cfg)
    assert np.allclose(traj.observable_records[:, 0].real, np.cos(g * traj.times) ** 2, atol=1e-6)


def test_symmetric_heating_linear_growth():
    space = HilbertSpace((6,))
    n = mode_operators(6)[2]
    cops = build_collapse_set(space, {"s0": MotionalHeating(8100.0, "symmetric")})
    model = LindbladModel(space, [], cops)
    cfg = EvolutionConfig(0.0, 1e-6, 1e-9, observables=(n,))
    traj = evolve_lindblad(model, basis_state(space, (0,)), cfg)
    t = traj.times[1:]
    assert np.allclose(traj.observable_records[1:, 0].real, 8100.0 * t, rtol=0.01)


def test_unitary_purity_and_trace():
    space = HilbertSpace((3, 3))
    a = embed(mode_operators(3)[0], space, 0)
    b = embed(mode_operators(3)[0], space, 1)
    v = 2e6 * a.conj().T @ b
    model = LindbladModel(space, [(v, rotating(1e6)), (v.conj().T, rotating(-1e6))])
    rho0 = product_state(thermal_state(0.5, 3), basis_state(HilbertSpace((3,)), (1,)))
    cfg = EvolutionConfig(0.0, 2e-6, 1e-9, checkpoint_times=(1e-6, 2e-6))
    traj = evolve_lindblad(model, rho0, cfg)
    p0 = rho0.purity()
    for t in (1e-6, 2e-6):
        s = traj.state_at(t)
        assert s.purity() == pytest.approx(p0, abs=1e-8)
        assert abs(np.trace(s.rho) - 1) < 1e-8
        assert np.max(np.abs(s.rho - s.rho.conj().T)) < 1e-9


def test_unstable_step_raises():
    # RK4 amplifies by ~13.7 per step at rate*h = 5, overflowing long before the end
    with pytest.raises(IntegrationDiverged):
        _decay(5.0, t1=1.0, t_end=5000.0)


def test_dephasing_examples():
    assert dephasing_rate(70e-6, 92e-6) == pytest.approx(1 / 92e-6 - 1 / 140e-6)
    assert dephasing_rate(70e-6, 92e-6) == pytest.approx(3727, rel=1e-3)
    assert dephasing_rate(50e-6, 100e-6) == 0.0
    with pytest.raises(UnphysicalDephasing):
        dephasing_rate(50e-6, 101e-6)


def test_collapse_channels():
    ops = channel_ops(MotionalHeating(8100.0, "symmetric"), 4)
    a, ad, _ = mode_operators(4)
    assert [r for _, r in ops] == [8100.0, 8100.0]
    assert np.array_equal(ops[0][0], ad) and np.array_equal(ops[1][0], a)
    assert [r for _, r in channel_ops(MotionalHeating(8100.0, "raising"), 4)] == [8100.0]
    q = channel_ops(QubitDecoherence(70e-6, 92e-6), 2)
    assert q[0][1] == pytest.approx(1 / 70e-6)
    assert q[1][1] == pytest.approx(0.5 * dephasing_rate(70e-6, 92e-6))
    r = channel_ops(ResonatorDecoherence(45e-6), 3)
    assert len(r) == 1 and r[0][1] == pytest.approx(1 / 45e-6)


def test_qubit_dephasing_decays_coherence():
    # coherence decays at 1/t2 under relaxation plus dephasing
    t1, t2 = 70e-6, 92e-6
    space = HilbertSpace((2,), ("transmon",))
    model = LindbladModel(space, [], build_collapse_set(space, {"transmon": QubitDecoherence(t1, t2)}))
    plus = QuantumState(space, 0.5 * np.ones((2, 2)))
    cfg = EvolutionConfig(0.0, 50e-6, 50e-9, checkpoint_times=(50e-6,))
    s = evolve_lindblad(model, plus, cfg).state_at(50e-6)
    assert abs(s.rho[0, 1]) == pytest.approx(0.5 * math.exp(-50e-6 / t2), rel=1e-6)


@given(st.floats(0.1, 100), st.floats(0.01, 10))
def test_time_grid_hits_checkpoints(t_end, frac):
    ck = t_end * min(frac, 1.0) * 0.5
    g = time_grid(0.0, t_end, t_end / 37, (ck,))
    assert np.all(np.diff(g) > 0)
    assert np.min(np.abs(g - ck)) == 0
    assert np.max(np.diff(g)) <= t_end / 37 * (1 + 1e-9)


def test_config_validation():
    with pytest.raises(ValidationError):
        EvolutionConfig(0.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        EvolutionConfig(1.0, 1.0, 0.1)


# --------------------------------------------------------------------------
# Gaussian solver


def test_gaussian_static():
    m = GaussianModel(np.zeros((2, 2)), 0.0, 0.0, [3.0, 1.0])
    tr = evolve_gaussian(m, 1e-6, 11)
    assert np.allclose(tr.occupations, [[3.0, 1.0]] * 11)


def test_gaussian_lossless_exchange():
    g = TWO_PI * 1.1e6
    m = GaussianModel([[0, g], [g, 0]], 0.0, 0.0, [41.2, 0.0])
    tr = evolve_gaussian(m, math.pi / (2 * g), 3)
    assert tr.occupations[-1] == pytest.approx([0.0, 41.2], abs=1e-9)


def test_gaussian_symmetric_heating_rate():
    m = GaussianModel([[0.0]], 0.0, 8100.0, [0.0])
    tr = evolve_gaussian(m, 1e-6, 5)
    assert np.allclose(tr.occupations[:, 0], 8100.0 * tr.times, rtol=1e-9, atol=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(1e3, 1e6))
def test_gaussian_thermalizes_to_bath(n0, kappa):
    m = GaussianModel([[0.0]], kappa, 0.0, [n0], bath_occupations=[0.7])
    tr = evolve_gaussian(m, 50 / kappa, 3)
    assert tr.occupations[-1, 0] == pytest.approx(0.7, abs=1e-9)


def test_gaussian_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        GaussianModel([[0, 1], [2, 0]], 0.0, 0.0, [0, 0])


def test_gaussian_matches_fock_solver():
    """Beam splitter with resonator loss and electron heating, n = 2, truncation 12."""
    g, kappa, heat, dim = TWO_PI * 1.1e6, 1 / 45e-6, 8100.0, 12
    t_end = 300e-9
    space = HilbertSpace((dim, dim), ("electron", "resonator"))
    a = embed(mode_operators(dim)[0], space, 0)
    b = embed(mode_operators(dim)[0], space, 1)
    h = g * (a.conj().T @ b + b.conj().T @ a)
    cops = build_collapse_set(space, {"electron": MotionalHeating(heat, "symmetric"),
                                      "resonator": ResonatorDecoherence(45e-6)})
    rho0 = product_state(thermal_state(2.0, dim), basis_state(HilbertSpace((dim,)), (0,)))
    n_true = float(np.dot(np.arange(dim), thermal_populations(2.0, dim)))
    cfg = EvolutionConfig(0.0, t_end, 1e-9, observables=(a.conj().T @ a, b.conj().T @ b),
                          sample_stride=30)
    fock = evolve_lindblad(LindbladModel(space, [(h, 1.0)], cops), rho0, cfg)
    gm = GaussianModel([[0, g], [g, 0]], [0.0, kappa], [heat, 0.0], [n_true, 0.0])
    gauss = evolve_gaussian(gm, t_end, 301)
    occ = gauss.occupations[::30]
    assert np.max(np.abs(fock.observable_records.real - occ)) < 1e-3
