"""Config parsing, scenario runner, sweeps and the command-line front end."""

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from electrap.cli import main
from electrap.config import Param, parse_scalar, parse_value
from electrap.coupling import magic_detuning
from electrap.errors import ConfigError, UnknownScenario
from electrap.scenarios import SCENARIOS, render_csv, run_scenario, sweep

TWO_PI = 2 * math.pi
SMALL = {"n_motion": 3, "n_bus": 3}

REQUIRED = ("fig3-swap-n0", "fig3-swap-n1", "fig3-bell", "ee-swap-n0", "ee-swap-n1", "ee-bell",
            "cooling", "spin-motion-map", "rwa-validation", "trap-stability", "sidebands",
            "noise-tip-factor", "noise-ring-factor", "heating-rates", "appendixE-reduction",
            "appendixC-pickup", "appendixD-coupling", "impedance")


def test_scenario_library_complete():
    assert set(REQUIRED) <= set(SCENARIOS)


def test_unit_parsing():
    assert parse_scalar("500 MHz", "frequency") == pytest.approx(5e8)
    assert parse_scalar("1.1 MHz", "angular") == pytest.approx(TWO_PI * 1.1e6)
    assert parse_scalar("6.9e6 rad/s", "angular") == pytest.approx(6.9e6)
    assert parse_scalar("2pi*1.1e6 rad/s", "angular") == pytest.approx(TWO_PI * 1.1e6)
    assert parse_scalar("557 ns", "time") == pytest.approx(557e-9)
    assert parse_scalar("350 nm", "length") == pytest.approx(350e-9)
    assert parse_scalar("10 aF", "capacitance") == pytest.approx(10e-18)
    assert parse_scalar("30 mK", "temperature") == pytest.approx(0.03)
    assert parse_scalar("8100", "rate") == 8100.0
    assert parse_value("1, 2;3", Param([], "int", is_list=True)) == [1, 2, 3]
    with pytest.raises(ConfigError):
        parse_scalar("5 meter", "time")
    with pytest.raises(ConfigError):
        parse_scalar("fast", "float")


@given(st.floats(1e-3, 1e12))
def test_angular_frequency_convention(f):
    assert parse_scalar(f"{f!r} Hz", "angular") == pytest.approx(TWO_PI * f, rel=1e-12)
    assert parse_scalar(f"{f!r} rad/s", "angular") == pytest.approx(f, rel=1e-12)


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_config_file_and_errors(tmp_path):
    good = _write(tmp_path / "ok.ini", "[scenario]\nname = impedance\n[params]\n"
                  "target_Z = 2 kohm   # units\n")
    res = run_scenario(config=good)
    assert res.summary["required_Z_cpw"] == pytest.approx(2000 * math.pi / 4)
    bad = _write(tmp_path / "bad.ini", "[scenario]\nname = impedance\n[params]\n\nbogus = 1\n")
    with pytest.raises(ConfigError, match=r"bad.ini:5 \[params\] bogus"):
        run_scenario(config=bad)
    units = _write(tmp_path / "units.ini", "[scenario]\nname = impedance\n[params]\n"
                   "target_Z = 3 ns\n")
    with pytest.raises(ConfigError, match=r":4 \[params\] target_Z"):
        run_scenario(config=units)


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        run_scenario("no-such-scenario")


def test_csv_headers_carry_units(tmp_path):
    res = run_scenario("cooling", out=str(tmp_path))
    header = (tmp_path / "occupations.csv").read_text().splitlines()[0]
    assert header == "time [s],electron [quanta],resonator [quanta]"
    assert res.manifest["units"]["g_p"] == "rad/s"
    assert all(v is not None for v in res.manifest["params"].values())


def test_manifest_rerun_is_byte_identical(tmp_path):
    first = run_scenario("fig3-swap", SMALL, {"sample_stride": 50}, out=str(tmp_path / "a"))
    second = run_scenario(manifest=str(tmp_path / "a" / "manifest.json"), out=str(tmp_path / "b"))
    assert first.manifest["outputs"] == second.manifest["outputs"]
    for name in first.manifest["outputs"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sweep_n_tau_column():
    g_p = TWO_PI * 1.1e6
    tab = sweep("fig3-swap", "n", [2, 0, 1], SMALL, {"sample_stride": 100})
    head = [h.split(" ")[0] for h in tab.header()]
    col = head.index("tau_swap")
    assert [r[0] for r in tab.rows] == [2, 0, 1]
    for row in tab.rows:
        assert row[col] == magic_detuning(row[0], g_p)[1]
        assert row[col] == (math.pi / g_p) * math.sqrt((2 * row[0] + 1) / 2)


def test_sweep_heating_monotone():
    tab = sweep("fig3-swap", "heating", [0.0, 8100.0], SMALL, {"sample_stride": 100})
    col = [h.split(" ")[0] for h in tab.header()].index("swap_fidelity")
    assert tab.rows[0][col] > tab.rows[1][col]


def test_sweep_delta_peaks_at_magic_value():
    d1 = magic_detuning(1, TWO_PI * 1.1e6)[0]
    values = [d1 * f for f in (0.85, 0.9, 0.95, 1.0, 1.05, 1.1, 1.15)]
    tab = sweep("fig3-swap", "delta", values, SMALL, {"sample_stride": 100})
    col = [h.split(" ")[0] for h in tab.header()].index("swap_fidelity")
    fid = [r[col] for r in tab.rows]
    assert int(np.argmax(fid)) == 3


def test_sweep_unresolvable_path():
    with pytest.raises(ConfigError):
        sweep("impedance", "params.nope", [1])


def test_render_csv_round_trip():
    res = run_scenario("impedance")
    text = render_csv(res.outcome.tables["impedance"])
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    assert float(rows[0][2]) == pytest.approx(4 * 50 / math.pi, rel=1e-15)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["simulate", "impedance", "--out", str(tmp_path / "o"), "--seedless"]) == 0
    assert (tmp_path / "o" / "manifest.json").exists()
    assert main(["simulate", "nope"]) == 2
    assert main(["simulate", "impedance", "--set", "bogus=1"]) == 2
    bad = _write(tmp_path / "bad.ini", "[scenario]\nname = impedance\n[params]\nwho = 1\n")
    assert main(["simulate", "--config", bad]) == 2
    assert "bad.ini:4" in capsys.readouterr().err
    # a step far beyond RK4 stability breaks positivity at the checkpoints
    assert main(["simulate", "fig3-swap", "--set", "solver.step=200 ns", "--set", "n_motion=3",
                 "--set", "n_bus=3"]) == 3
    assert "negative eigenvalue" in capsys.readouterr().err


def test_cli_groups_and_listing(tmp_path, capsys):
    assert main(["scenarios"]) == 0
    assert "fig3-swap-n1" in capsys.readouterr().out
    assert main(["design", "rates"]) == 0
    out = capsys.readouterr().out
    assert "g_p" in out
    assert main(["design", "sidebands"]) == 2
    assert main(["sweep", "impedance", "--param", "target_Z", "--values", "1 kohm,2 kohm"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("target_Z [ohm]")
    assert len(lines) == 3


def test_cli_manifest_rerun(tmp_path):
    assert main(["simulate", "appendixC-pickup", "--out", str(tmp_path / "a")]) == 0
    doc = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert doc["params"]["transfer"] is not None
    assert main(["simulate", "--manifest", str(tmp_path / "a" / "manifest.json"),
                 "--out", str(tmp_path / "b")]) == 0
    for name in doc["outputs"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
