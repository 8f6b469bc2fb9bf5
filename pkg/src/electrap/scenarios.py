"""Named, fully-resolved experiments with CSV outputs and JSON run manifests.

A scenario is a parameter schema plus a runner. Resolution expands every
default (including derived values such as the magic detuning) into explicit
SI numbers before anything runs, and the manifest stores that resolved set
so a rerun reproduces the CSVs byte for byte.
"""

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import __version__, circuit, coupling, noise, trap
from .config import Param, load_config, parse_value
from .constants import CONST, TWO_PI, bose_occupation
from .errors import ConfigError, UnknownScenario
from .lindblad import default_step, evolve_gaussian
from .params import CouplingGeometry, DriveParams, ElectronParams, ResonatorParams, zeeman_splitting

MHz = TWO_PI * 1e6
GHz = TWO_PI * 1e9


@dataclass
class Table:
    columns: list  # (name, unit) pairs
    rows: list

    def header(self):
        return [f"{n} [{u}]" if u else n for n, u in self.columns]


@dataclass
class Outcome:
    tables: dict
    summary: list  # (metric, value, unit)


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    params: dict
    solver: dict
    runner: object
    derive: object = None


SCENARIOS = {}


def register(name, description, params, solver=None, derive=None):
    def deco(fn):
        SCENARIOS[name] = Scenario(name, description, params, solver or {}, fn, derive)
        return fn
    return deco


def get_scenario(name):
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; see `electrap scenarios`") from None


def schemas(name):
    sc = get_scenario(name)
    return sc.params, sc.solver


def resolve(name, params=None, solver=None):
    """Defaults merged with overrides; derived entries are filled in by the scenario."""
    sc = get_scenario(name)
    p = {k: v.default for k, v in sc.params.items()}
    s = {k: v.default for k, v in sc.solver.items()}
    for given, target, schema, label in ((params, p, sc.params, "params"),
                                         (solver, s, sc.solver, "solver")):
        for key, value in (given or {}).items():
            if key not in schema:
                raise ConfigError(f"{name}: unknown {label} field {key!r}")
            target[key] = value
    if sc.derive is not None:
        sc.derive(p, s)
    missing = [k for k, v in {**p, **s}.items() if v is None]
    if missing:
        raise ConfigError(f"{name}: unresolved fields {missing}")
    return p, s


# --------------------------------------------------------------------------
# running and output


@dataclass
class RunResult:
    name: str
    params: dict
    solver: dict
    outcome: Outcome
    manifest: dict
    paths: list = field(default_factory=list)

    @property
    def summary(self):
        return {m: v for m, v, _ in self.outcome.summary}


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def render_csv(table):
    lines = [",".join(table.header())]
    for row in table.rows:
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def summary_table(outcome):
    return Table([("metric", ""), ("value", ""), ("unit", "")],
                 [(m, v, u) for m, v, u in outcome.summary])


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def run_scenario(name=None, params=None, solver=None, out=None, config=None, manifest=None):
    """Run a scenario by name, config file, or previous manifest.

    Outputs (one CSV per table, ``summary.csv``, ``manifest.json``) are written
    to ``out`` when given.
    """
    if manifest is not None:
        with open(manifest, encoding="utf-8") as fh:
            doc = json.load(fh)
        name, params, solver = doc["scenario"], doc["params"], doc["solver"]
    elif config is not None:
        cfg = load_config(config, schemas)
        name = cfg.name
        params = {**cfg.params, **(params or {})}
        solver = {**cfg.solver, **(solver or {})}
    sc = get_scenario(name)
    p, s = resolve(name, params, solver)
    start = time.perf_counter()
    outcome = sc.runner(dict(p), dict(s))
    duration = time.perf_counter() - start
    files = {f"{k}.csv": render_csv(t) for k, t in outcome.tables.items()}
    files["summary.csv"] = render_csv(summary_table(outcome))
    doc = {
        "scenario": name,
        "version": __version__,
        "params": {k: _jsonable(v) for k, v in p.items()},
        "units": {k: sc.params[k].unit for k in p},
        "solver": {k: _jsonable(v) for k, v in s.items()},
        "seedless": True,
        "outputs": {f: hashlib.sha256(txt.encode()).hexdigest() for f, txt in sorted(files.items())},
        "duration_s": duration,
    }
    paths = []
    if out is not None:
        os.makedirs(out, exist_ok=True)
        for fname, txt in sorted(files.items()):
            path = os.path.join(out, fname)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(txt)
            paths.append(path)
        mpath = os.path.join(out, "manifest.json")
        with open(mpath, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths.append(mpath)
    return RunResult(name, p, s, outcome, doc, paths)


def sweep(name, path, values, params=None, solver=None, out=None):
    """Independent runs over ``values`` of ``path`` (``params.x``, ``solver.x`` or ``x``).

    Returns a table with one row per value, in input order, holding the
    numeric summary metrics.
    """
    sc = get_scenario(name)
    section, _, key = path.rpartition(".")
    section = section or ("solver" if key in sc.solver and key not in sc.params else "params")
    schema = sc.params if section == "params" else sc.solver if section == "solver" else None
    if schema is None or key not in schema:
        raise ConfigError(f"{name}: cannot resolve parameter path {path!r}")
    rows, metrics = [], None
    for v in values:
        if isinstance(v, str):
            v = parse_value(v, schema[key], path)
        p = dict(params or {})
        s = dict(solver or {})
        (p if section == "params" else s)[key] = v
        res = run_scenario(name, p, s)
        numeric = [(m, val, u) for m, val, u in res.outcome.summary
                   if isinstance(val, (int, float, np.integer, np.floating))]
        if metrics is None:
            metrics = [(m, u) for m, _, u in numeric]
        rows.append([v] + [val for _, val, _ in numeric])
    table = Table([(key, schema[key].unit)] + metrics, rows)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, f"sweep_{name}_{key}.csv"), "w", encoding="utf-8",
                  newline="") as fh:
            fh.write(render_csv(table))
    return table


# --------------------------------------------------------------------------
# chain transfer (electron - bus - transmon / electron)


def _chain_params(kind, n, levels):
    return {
        "kind": Param(kind, "str", "electron-transmon or electron-electron"),
        "n": Param(n, "int", "magic-detuning index"),
        "g_p": Param(1.1 * MHz, "angular", "electron-bus coupling"),
        "g_end": Param(None, "angular", "bus-end coupling (defaults to g_p)"),
        "delta": Param(None, "angular", "bus detuning (defaults to the magic value)"),
        "duration": Param(None, "time", "evolution time (defaults to tau_swap)"),
        "heating": Param(8100.0, "rate", "electron heating"),
        "heating_model": Param("raising", "str", "raising or symmetric"),
        "bus_t1": Param(45e-6, "time"),
        "transmon_t1": Param(70e-6, "time"),
        "transmon_t2": Param(92e-6, "time"),
        "n_motion": Param(levels, "int", "electron Fock truncation"),
        "n_bus": Param(levels, "int", "bus Fock truncation"),
    }


CHAIN_SOLVER = {"step": Param(None, "time"), "sample_stride": Param(10, "int")}


def _derive_chain(p, s):
    delta, tau = coupling.magic_detuning(p["n"], p["g_p"])
    if p["g_end"] is None:
        p["g_end"] = p["g_p"]
    if p["delta"] is None:
        p["delta"] = delta
    if p["duration"] is None:
        p["duration"] = tau
    if s["step"] is None:
        s["step"] = default_step(abs(p["delta"]) / TWO_PI, p["duration"])


def _run_chain(p, s):
    res = coupling.simulate_chain(
        p["kind"], p["n"], p["g_p"], p["g_end"], heating=p["heating"],
        heating_model=p["heating_model"], bus_t1=p["bus_t1"], transmon_t1=p["transmon_t1"],
        transmon_t2=p["transmon_t2"], n_motion=p["n_motion"], n_bus=p["n_bus"],
        delta=p["delta"], duration=p["duration"], step=s["step"],
        sample_stride=s["sample_stride"],
    )
    end = "transmon" if p["kind"] == "electron-transmon" else "electron2"
    pops = Table([("time", "s"), ("electron", "quanta"), ("bus", "quanta"), (end, "quanta")],
                 res.populations().tolist())
    _, tau = coupling.magic_detuning(p["n"], p["g_p"])
    summary = [
        ("tau_swap", tau, "s"),
        ("duration", p["duration"], "s"),
        ("delta", p["delta"], "rad/s"),
        ("swap_fidelity", res.swap_fidelity, "1"),
        ("bell_time", 0.5 * p["duration"], "s"),
        ("bell_fidelity", res.bell_fidelity, "1"),
        ("bus_population_final", float(np.real(res.trajectory.observable_records[-1, 1])), "quanta"),
    ]
    return Outcome({"populations": pops}, summary)


for _name, _kind, _n, _lev, _desc in (
    ("fig3-swap", "electron-transmon", 1, 5, "electron-transmon transfer (generic, sweepable)"),
    ("fig3-swap-n0", "electron-transmon", 0, 5, "electron-transmon swap at zero detuning"),
    ("fig3-swap-n1", "electron-transmon", 1, 5, "electron-transmon swap at the first magic detuning"),
    ("fig3-bell", "electron-transmon", 1, 5, "electron-transmon Bell state at half the swap time"),
    ("ee-swap-n0", "electron-electron", 0, 4, "electron-electron swap at zero detuning"),
    ("ee-swap-n1", "electron-electron", 1, 4, "electron-electron swap at the first magic detuning"),
    ("ee-bell", "electron-electron", 1, 4, "electron-electron Bell state at half the swap time"),
):
    register(_name, _desc, _chain_params(_kind, _n, _lev), CHAIN_SOLVER, _derive_chain)(_run_chain)


# --------------------------------------------------------------------------
# cooling


def _derive_cooling(p, s):
    if p["resonator_nbar"] is None:
        p["resonator_nbar"] = bose_occupation(p["Omega"] / TWO_PI, p["resonator_temperature"])


@register("cooling", "swap a thermal electron into a cold resonator (second-moment solver)", {
    "g_p": Param(1.1 * MHz, "angular"),
    "n_electron": Param(41.2, "float", "initial electron occupation"),
    "heating": Param(8100.0, "rate"),
    "heating_model": Param("symmetric", "str"),
    "resonator_t1": Param(45e-6, "time"),
    "Omega": Param(7 * GHz, "angular", "resonator frequency"),
    "resonator_temperature": Param(0.03, "temperature"),
    "resonator_nbar": Param(None, "float", "resonator bath occupation (defaults to thermal)"),
    "duration": Param(227e-9, "time"),
}, {"samples": Param(228, "int")}, _derive_cooling)
def _run_cooling(p, s):
    model = coupling.cooling_model(p["g_p"], p["n_electron"], p["heating"], p["resonator_t1"],
                                   p["resonator_nbar"], p["heating_model"])
    traj = evolve_gaussian(model, p["duration"], s["samples"])
    t_swap = math.pi / (2 * p["g_p"])
    exact = evolve_gaussian(model, t_swap, 2)
    occ = Table([("time", "s"), ("electron", "quanta"), ("resonator", "quanta")],
                np.column_stack([traj.times, traj.occupations]).tolist())
    residual = float(traj.occupations[-1, 0])
    summary = [
        ("duration", p["duration"], "s"),
        ("residual_occupation", residual, "quanta"),
        ("ground_state_fidelity", traj.ground_state_fidelity(0), "1"),
        ("swap_time", t_swap, "s"),
        ("residual_at_swap_time", float(exact.occupations[-1, 0]), "quanta"),
        ("fidelity_at_swap_time", exact.ground_state_fidelity(0), "1"),
        ("resonator_nbar", p["resonator_nbar"], "quanta"),
    ]
    return Outcome({"occupations": occ}, summary)


# --------------------------------------------------------------------------
# spin-motion


def _derive_spin(p, s):
    if p["duration"] is None:
        p["duration"] = math.pi / (2 * p["coupling"])
    if s["step"] is None:
        s["step"] = default_step(0.0, p["duration"])


@register("spin-motion-map", "map a motional qubit onto the electron spin", {
    "coupling": Param(0.41 * MHz, "angular", "sideband exchange rate"),
    "heating": Param(8100.0, "rate"),
    "heating_model": Param("raising", "str"),
    "n_motion": Param(4, "int"),
    "duration": Param(None, "time", "defaults to pi/(2 coupling)"),
    "coil_radius": Param(50e-6, "length"),
    "coil_current": Param(1.0, "current"),
    "omega_y": Param(500 * MHz, "angular"),
    "B0": Param(1e-3, "field"),
    "S_B": Param((14e-12) ** 2, "psd"),
    "psd_one_sided": Param(True, "bool"),
}, {"step": Param(None, "time"), "sample_stride": Param(10, "int")}, _derive_spin)
def _run_spin(p, s):
    res = coupling.spin_motion_map_sim(p["coupling"], p["heating"], p["heating_model"],
                                       p["duration"], p["n_motion"], s["step"])
    traj = res.trajectory
    k = max(1, s["sample_stride"])
    rows = np.column_stack([traj.times, np.real(traj.observable_records)])[::k]
    pops = Table([("time", "s"), ("motion", "quanta"), ("spin_up", "1")], rows.tolist())
    electron = ElectronParams(omega=(p["omega_y"], p["omega_y"], p["omega_y"]), B0=p["B0"])
    rate = coupling.spin_motion_rate(p["coil_radius"], p["coil_current"], electron)
    summary = [
        ("map_time", res.map_time, "s"),
        ("map_fidelity", res.fidelity, "1"),
        ("gradient", rate.gradient, "T/m"),
        ("rabi_rate", rate.rabi_rate, "rad/s"),
        ("sideband_coupling", rate.sideband_coupling, "rad/s"),
        ("drive_frequency", rate.drive_frequency, "rad/s"),
        ("zeeman_splitting", zeeman_splitting(p["B0"]), "rad/s"),
        ("spin_T2", coupling.spin_coherence(p["S_B"], p["psd_one_sided"]), "s"),
    ]
    return Outcome({"populations": pops}, summary)


# --------------------------------------------------------------------------
# rotating-wave validation


def _derive_rwa(p, s):
    if p["Omega_d"] is None:
        p["Omega_d"] = p["Omega"] - p["omega_y"]
    if p["duration"] is None:
        p["duration"] = math.pi / (2 * p["g_p"])
    if s["step"] is None:
        f_max = (p["Omega"] + p["omega_y"] + p["Omega_d"]) / TWO_PI
        s["step"] = default_step(f_max, p["duration"])


@register("rwa-validation", "full time-dependent coupling against the beam-splitter limit", {
    "g_p": Param(1.1 * MHz, "angular"),
    "Omega": Param(7 * GHz, "angular"),
    "omega_y": Param(500 * MHz, "angular"),
    "Omega_d": Param(None, "angular", "defaults to Omega - omega_y"),
    "n_levels": Param(3, "int"),
    "duration": Param(None, "time", "defaults to the first exchange maximum"),
}, {"step": Param(None, "time"), "samples": Param(501, "int")}, _derive_rwa)
def _run_rwa(p, s):
    common = dict(n_levels=p["n_levels"], step=s["step"], samples=s["samples"])
    full = coupling.simulate_exchange(p["g_p"], p["duration"], "full-time-dependent",
                                      Omega=p["Omega"], omega_y=p["omega_y"],
                                      Omega_d=p["Omega_d"], **common)
    rwa = coupling.simulate_exchange(p["g_p"], p["duration"], "rwa-beamsplitter", **common)
    rows = np.column_stack([full.times, np.real(full.observable_records),
                            np.real(rwa.observable_records)])
    tab = Table([("time", "s"), ("electron_full", "quanta"), ("resonator_full", "quanta"),
                 ("electron_rwa", "quanta"), ("resonator_rwa", "quanta")], rows.tolist())
    p_full = float(np.real(full.observable_records[-1, 1]))
    p_rwa = float(np.real(rwa.observable_records[-1, 1]))
    summary = [
        ("duration", p["duration"], "s"),
        ("transfer_full", p_full, "quanta"),
        ("transfer_rwa", p_rwa, "quanta"),
        ("relative_difference", abs(p_full - p_rwa) / p_rwa, "1"),
        ("max_population_difference",
         float(np.max(np.abs(rows[:, 2] - rows[:, 4]))), "quanta"),
    ]
    return Outcome({"transfer": tab}, summary)


# --------------------------------------------------------------------------
# trap dynamics


TRAP_PARAMS = {
    "omega_x": Param(400 * MHz, "angular"),
    "omega_y": Param(500 * MHz, "angular"),
    "omega_z": Param(400 * MHz, "angular"),
    "Omega_tr": Param(7 * GHz, "angular"),
    "A_d": Param(350e-9, "length"),
    "drive_phase": Param(math.pi / 2, "angle"),
    "secular_offset": Param(10e-9, "length", "initial secular displacement per axis"),
}


def _section3(p, Omega_d=None, A_d=None):
    return trap.section3_model(
        (p["omega_x"], p["omega_y"], p["omega_z"]), p["Omega_tr"],
        Omega_d=Omega_d, A_d=p["A_d"] if A_d is None else A_d, drive_phase=p["drive_phase"])


def _run_model(model, p, duration, stride):
    r0, v0 = trap.driven_initial_conditions(model, (p["secular_offset"],) * 3)
    return trap.integrate_motion(model, r0, v0, (0.0, duration), stride=stride)


@register("trap-stability", "trap preset stability, secular frequencies and Mathieu edge", {
    **TRAP_PARAMS,
    "secular_periods": Param(200, "int"),
    "scan_q": Param(list(np.round(np.linspace(0.80, 1.0, 41), 6)), "float", is_list=True),
}, {"stride": Param(4, "int"), "steps_per_period": Param(100, "int")})
def _run_trap(p, s):
    model = _section3(p)
    w_est = model.secular_estimate()
    duration = p["secular_periods"] * TWO_PI / float(np.min(w_est))
    rec = _run_model(model, p, duration, s["stride"])
    w_floq = trap.floquet_secular(model)
    a, q = model.mathieu()
    rows, worst = [], 0.0
    for i, ax in enumerate("xyz"):
        spec = trap.extract_spectrum(rec, ax)
        low = spec.frequencies[np.argmax(spec.frequencies > 0)]
        worst = max(worst, float(abs(low / w_floq[i] - 1)))
        rows.append([ax, a[i], q[i], w_est[i], w_floq[i], low])
    axes = Table([("axis", ""), ("a", "1"), ("q", "1"), ("secular_estimate", "rad/s"),
                  ("secular_floquet", "rad/s"), ("secular_measured", "rad/s")], rows)
    y_spec = trap.extract_spectrum(rec, "y")
    driven = y_spec.near(model.Omega_d, 2 * trap.bin_width(rec))
    qs = np.asarray(p["scan_q"], dtype=float)
    stable = trap.stability_scan([0.0], qs, steps_per_period=s["steps_per_period"])[0]
    scan = Table([("q", "1"), ("stable", "")], [[qv, bool(st)] for qv, st in zip(qs, stable)])
    edge_scan = float(qs[np.argmin(stable)]) if not stable.all() else float("nan")
    summary = [
        ("bounded", bool(trap.is_bounded(rec)), ""),
        ("duration", duration, "s"),
        ("driven_amplitude", driven, "m"),
        ("max_secular_deviation", worst, "1"),
        ("stability_edge_floquet", trap.stability_edge(), "1"),
        ("stability_edge_scan", edge_scan, "1"),
        ("frequency_resolution", trap.bin_width(rec), "rad/s"),
    ]
    return Outcome({"axes": axes, "mathieu_scan": scan}, summary)


def _on_grid(freq, base, omega, tol, m_max=2):
    """True when ``freq`` equals ``k*base + m*omega`` for integers ``k >= 0`` and ``|m| <= m_max``."""
    for m in range(-m_max, m_max + 1):
        k = round((freq - m * omega) / base)
        if k >= 0 and abs(freq - k * base - m * omega) <= tol:
            return True
    return False


@register("sidebands", "sideband spectrum of the quadrupole coupling signal", {
    **TRAP_PARAMS,
    "Omega_d_other": Param(6.3 * GHz, "angular", "drive frequency for the detuned case"),
    "A_d_other": Param(50e-9, "length"),
    "duration": Param(120e-9, "time"),
}, {"stride": Param(2, "int")})
def _run_sidebands(p, s):
    rows, summary = [], []
    for case, Od, Ad in (("equal", p["Omega_tr"], p["A_d"]),
                         ("detuned", p["Omega_d_other"], p["A_d_other"])):
        model = _section3(p, Omega_d=Od, A_d=Ad)
        rec = _run_model(model, p, p["duration"], s["stride"])
        spec = trap.extract_spectrum(rec, "y", "quadrupole")
        tol = 2 * trap.bin_width(rec)
        w = trap.floquet_secular(model)[1]
        for f, amp in zip(spec.frequencies, spec.amplitudes):
            rows.append([case, f, amp])
        if case == "equal":
            stray = sum(not _on_grid(f, model.Omega_tr, w, tol) for f in spec.frequencies)
            summary += [("equal_unexplained_peaks", stray, "count"),
                        ("equal_drive_minus", spec.near(Od - w, tol) > 0, ""),
                        ("equal_drive_plus", spec.near(Od + w, tol) > 0, "")]
        else:
            for n in (-1, 0, 1):
                found = all(spec.near(abs(Od + n * model.Omega_tr + sgn * w), tol) > 0
                            for sgn in (-1, 1))
                summary.append((f"detuned_order_{n:+d}_found", found, ""))
    peaks = Table([("case", ""), ("frequency", "rad/s"), ("amplitude", "m^2")], rows)
    return Outcome({"peaks": peaks}, summary)


# --------------------------------------------------------------------------
# surface noise


@register("noise-tip-factor", "tip noise relative to a plane at the apex distance", {
    "alphas": Param([math.radians(a) for a in (5, 10, 20, 45, 90, 135, 180)], "angle",
                    is_list=True),
    "orientation": Param("isotropic", "str"),
}, {"rtol": Param(1e-3, "float")})
def _run_tip(p, s):
    rows = []
    for a in p["alphas"]:
        g = noise.SurfaceGeometry("cone", distance=1.0, alpha=a, orientation=p["orientation"])
        f = noise.dipole_field_noise(g, rtol=s["rtol"]) / noise.dipole_field_noise(
            noise.SurfaceGeometry("plane", distance=1.0, orientation=p["orientation"]),
            rtol=s["rtol"])
        rows.append([a, f, a / 10])
    tab = Table([("alpha", "rad"), ("factor", "1"), ("alpha_over_10", "1")], rows)
    summary = [(f"factor_{math.degrees(a):.0f}deg", f, "1") for a, f, _ in rows]
    return Outcome({"tip_factor": tab}, summary)


@register("noise-ring-factor", "ring electrode noise relative to a plane at D/2", {
    "D": Param(100e-6, "length"),
    "a_over_D": Param([0.0, 0.05, 0.1, 0.2, 0.3, 0.5], "float", is_list=True),
    "orientation": Param("isotropic", "str"),
}, {"rtol": Param(1e-3, "float")})
def _run_ring(p, s):
    rows = []
    plane = noise.dipole_field_noise(
        noise.SurfaceGeometry("plane", distance=0.5 * p["D"], orientation=p["orientation"]),
        rtol=s["rtol"])
    for x in p["a_over_D"]:
        g = noise.SurfaceGeometry("ring", D=p["D"], a=x * p["D"], orientation=p["orientation"])
        num = noise.dipole_field_noise(g, rtol=s["rtol"]) / plane
        closed = noise.ring_noise_factor(p["D"], x * p["D"])
        rows.append([x, num, closed, num / closed - 1])
    tab = Table([("a_over_D", "1"), ("numeric", "1"), ("closed_form", "1"),
                 ("relative_difference", "1")], rows)
    within = [abs(r[3]) for r in rows if r[0] <= 0.3]
    summary = [("max_relative_difference_to_0.3", max(within) if within else float("nan"), "1")]
    return Outcome({"ring_factor": tab}, summary)


@register("heating-rates", "heating rates from one noise calibration and two frequency laws", {
    "frequency": Param(500e6, "frequency"),
    "rate_beta1": Param(8100.0, "rate"),
    "rate_beta15": Param(690.0, "rate"),
    "distances": Param(list(np.logspace(np.log10(20e-6), np.log10(200e-6), 6)), "length",
                       is_list=True),
})
def _run_heating(p, s):
    f_ref, s_ref, res = noise.electron_heating_pair(p["frequency"], p["rate_beta1"],
                                                    p["rate_beta15"])
    d = np.asarray(p["distances"])
    sn = np.array([noise.plane_reference(x) for x in d])
    slope = float(np.polyfit(np.log(d), np.log(sn), 1)[0])
    tab = Table([("distance", "m"), ("relative_S_E", "arb")], np.column_stack([d, sn]).tolist())
    summary = [
        ("reference_frequency", f_ref, "Hz"),
        ("reference_S_E", s_ref, "V^2/m^2/Hz"),
        ("rate_beta_1", res[1.0].rate, "1/s"),
        ("tau1_beta_1", res[1.0].tau1, "s"),
        ("rate_beta_1.5", res[1.5].rate, "1/s"),
        ("tau1_beta_1.5", res[1.5].tau1, "s"),
        ("plane_distance_exponent", slope, "1"),
    ]
    return Outcome({"plane_scaling": tab}, summary)


# --------------------------------------------------------------------------
# rates and circuit design


@register("rates", "zero-point amplitudes and the parametric coupling rate", {
    "omega_y": Param(500 * MHz, "angular"),
    "Omega": Param(7 * GHz, "angular"),
    "Z": Param(1000.0, "impedance"),
    "A_d": Param(350e-9, "length"),
    "D2_y": Param(7.3e-6, "length"),
    "calibration": Param(1.0, "float"),
})
def _run_rates(p, s):
    electron = ElectronParams(omega=(p["omega_y"],) * 3)
    res = ResonatorParams.from_omega_impedance(p["Omega"], p["Z"])
    card = coupling.parametric_rate(electron, res, DriveParams(A_d=p["A_d"]),
                                    CouplingGeometry(D2=(1.0, p["D2_y"], 1.0)),
                                    calibration=p["calibration"])
    summary = [("y0", card.y0, "m"), ("q0", card.q0, "C"), ("C", res.C, "F"),
               ("g", card.g, "rad/s"), ("g_p", card.g_p, "rad/s")]
    return Outcome({}, summary)


def _derive_reduction(p):
    if p["delta"] is None:
        p["delta"] = coupling.magic_detuning(1, p["g_p"])[0]


@register("appendixE-reduction", "cavity-transmon dressing and elimination", {
    "omega": Param(7 * GHz, "angular"),
    "g_p": Param(1.1 * MHz, "angular"),
    "delta": Param(None, "angular", "defaults to the first magic detuning"),
    "G_lc": Param(3 * MHz, "angular"),
    "Delta": Param(272.7 * MHz, "angular"),
    "G_tc": Param(100 * MHz, "angular"),
    "scan_G_tc": Param(40 * MHz, "angular", "transmon coupling of the dispersive scan"),
    "scan_Delta": Param([x * MHz for x in (450, 600, 1000, 2000, 5000)], "angular",
                        is_list=True),
}, derive=lambda p, s: _derive_reduction(p))
def _run_reduction(p, s):
    rows = []
    for D in p["scan_Delta"]:
        c4 = circuit.coupling_matrix4(p["omega"], p["g_p"], p["delta"], p["G_lc"], D, p["scan_G_tc"])
        red = circuit.dress_and_reduce(c4)
        _, _, dev = circuit.compare_eigenvalues(c4, red)
        rows.append([D, red.G_lt, dev, (p["scan_G_tc"] / D) ** 2])
    tab = Table([("Delta", "rad/s"), ("G_lt", "rad/s"), ("eigenvalue_deviation", "1"),
                 ("bound", "1")], rows)
    summary = [
        ("G_lt", circuit.eliminated_coupling(p["G_lc"], p["G_tc"], p["Delta"]), "rad/s"),
        ("dispersive", abs(p["Delta"]) >= 5 * abs(p["G_tc"]), ""),
        ("scan_within_bound", all(r[2] <= r[3] for r in rows), ""),
    ]
    return Outcome({"dispersive_scan": tab}, summary)


@register("appendixC-pickup", "drive pickup on the resonator and its cancellation", {
    "C_p": Param(1e-15, "capacitance", "pickup capacitance"),
    "imbalance": Param(10e-18, "capacitance", "C_p - C_b"),
    "V_d": Param(0.2, "voltage"),
    "delta_det": Param(500 * MHz, "angular"),
    "C_fine": Param(10e-18, "capacitance"),
    "Z": Param(1000.0, "impedance"),
    "Omega": Param(7 * GHz, "angular"),
    "target_photons": Param(200.0, "float"),
    "amplitude_error": Param(0.4e-3, "voltage"),
    "phase_error": Param(math.radians(10), "angle"),
    "coupling_C": Param(10e-18, "capacitance", "capacitance to the external load"),
    "load_R": Param(50.0, "impedance"),
    "transfer": Param(None, "float", "geometric transfer factor (defaults to calibrated)"),
}, derive=lambda p, s: _derive_pickup(p))
def _run_pickup(p, s):
    net, q0 = _pickup_net(p)
    naive = circuit.pickup_excitation(net, q0, 1.0)
    T = p["transfer"]
    amp_tol, ph_tol = circuit.fine_tune_tolerances(net, q0, T)
    balanced = circuit.PickupNetwork(net.C_p, net.C_p, net.C, net.V_d, delta_det=net.delta_det)
    summary = [
        ("naive_photons", naive, "quanta"),
        ("transfer", T, "1"),
        ("photons", circuit.pickup_excitation(net, q0, T), "quanta"),
        ("balanced_photons", circuit.pickup_excitation(balanced, q0, T), "quanta"),
        ("residual_amplitude_error",
         circuit.pickup_excitation(circuit.balanced_fine_tune(net, p["amplitude_error"]), q0, T),
         "quanta"),
        ("residual_phase_error",
         circuit.pickup_excitation(circuit.balanced_fine_tune(net, 0.0, p["phase_error"]), q0, T),
         "quanta"),
        ("amplitude_tolerance", amp_tol, "V"),
        ("phase_tolerance", ph_tol, "rad"),
        ("radiative_kappa", circuit.radiative_loss_rate(p["Omega"], p["coupling_C"], p["load_R"],
                                                        net.C), "1/s"),
    ]
    scale = [[k, circuit.pickup_excitation(
        circuit.PickupNetwork(net.C_p, net.C_p - k * p["imbalance"], net.C, net.V_d,
                              delta_det=net.delta_det), q0, T)] for k in (0.0, 0.5, 1.0, 2.0, 4.0)]
    return Outcome({"imbalance_scaling": Table([("imbalance_scale", "1"), ("photons", "quanta")],
                                               scale)}, summary)


def _pickup_net(p):
    res = ResonatorParams.from_omega_impedance(p["Omega"], p["Z"])
    q0 = math.sqrt(CONST.hbar / (2 * p["Z"]))
    net = circuit.PickupNetwork(p["C_p"], p["C_p"] - p["imbalance"], res.C, p["V_d"],
                                C_fine=p["C_fine"], delta_det=p["delta_det"])
    return net, q0


def _derive_pickup(p):
    if p["transfer"] is None:
        net, q0 = _pickup_net(p)
        p["transfer"] = circuit.calibrate_transfer(net, q0, p["target_photons"])


@register("appendixD-coupling", "line-cavity coupling: closed form against the line integral", {
    "d0": Param(200e-6, "length"),
    "wavelength": Param(17e-3, "length"),
    "l_eff_fraction": Param(0.5, "float", "l_eff / wavelength"),
    "omega_c": Param(7 * GHz, "angular"),
    "Z": Param(1000.0, "impedance"),
    "V": Param(circuit.CAVITY_VOLUME_PRESET, "volume"),
    "points": Param([4, 8, 16, 32, 64, 128], "int", is_list=True),
})
def _run_cavity(p, s):
    line = circuit.CPWLine(circuit.required_cpw_impedance(p["Z"]), 1, p["wavelength"], p["d0"],
                           p["l_eff_fraction"] * p["wavelength"])
    cav = circuit.CavityMode(p["omega_c"], p["V"])
    res = circuit.cpw_cavity_coupling(line, cav, p["Z"])

    def profile(x):
        return 1.0 + np.asarray(x) ** 2

    q0 = math.sqrt(CONST.hbar / (2 * p["Z"]))
    half = 0.5 * line.wavelength
    exact = line.l_eff / half * quad(
        lambda z: float(circuit.line_dipole_profile(z, line, q0)) * cav.E_C0 * profile(z / half),
        0.0, half, epsabs=0, epsrel=1e-13)[0] / CONST.hbar
    rows = []
    for n in p["points"]:
        g = circuit.coupling_integral(line, cav, p["Z"], profile, n)
        rows.append([n, g, abs(g - exact) / exact])
    conv = Table([("points", "1"), ("G_integral", "rad/s"), ("relative_error", "1")], rows)
    errs = np.array([r[2] for r in rows])
    order = float(-np.polyfit(np.log(p["points"]), np.log(errs), 1)[0])
    summary = [
        ("E_C0", cav.E_C0, "V/m"),
        ("G_closed", res.G_closed, "rad/s"),
        ("G_integral", res.G_integral, "rad/s"),
        ("relative_difference", res.relative_difference, "1"),
        ("convergence_order", order, "1"),
    ]
    return Outcome({"convergence": conv}, summary)


@register("impedance", "lumped impedance of CPW resonator modes", {
    "Z_cpw": Param([50.0, 100.0, 785.4], "impedance", is_list=True),
    "modes": Param([1, 2, 3], "int", is_list=True),
    "target_Z": Param(1000.0, "impedance"),
})
def _run_impedance(p, s):
    rows = [[z, n, circuit.effective_impedance(z, n)] for z in p["Z_cpw"] for n in p["modes"]]
    tab = Table([("Z_cpw", "ohm"), ("mode", "1"), ("Z", "ohm")], rows)
    summary = [("required_Z_cpw", circuit.required_cpw_impedance(p["target_Z"]), "ohm")]
    return Outcome({"impedance": tab}, summary)
