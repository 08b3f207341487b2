import json
import math

import pytest
from hypothesis import given, strategies as st

from hoeffding_game import cli, supermartingale
from hoeffding_game.config import ConfigError, parse_config
from hoeffding_game.protocol import CapitalLedger, LedgerEntry, Trace
from hoeffding_game.serialize import dumps_ledger, dumps_trace, loads_ledger, loads_trace

doubles = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(doubles, doubles, doubles, doubles), max_size=8))
def test_trace_roundtrip_value_exact(rows):
    trace = Trace.from_rows(rows)
    back = loads_trace(dumps_trace(trace))
    assert back == trace
    for r, s in zip(trace, back):
        assert math.copysign(1, r.outcome) == math.copysign(1, s.outcome)


@given(st.lists(st.tuples(doubles, doubles, doubles, doubles, doubles, doubles, doubles), max_size=6),
       doubles)
def test_ledger_roundtrip_value_exact(rows, k0):
    trace = Trace.from_rows([r[:4] for r in rows])
    ledger = CapitalLedger(k0, tuple(LedgerEntry(m, k, abs(d)) for *_, m, k, d in rows))
    assert loads_ledger(dumps_ledger(trace, ledger)) == (trace, ledger)


def test_nonfinite_refused():
    with pytest.raises(ValueError):
        dumps_trace(Trace.from_rows([(0, 1, 0.5, float("inf"))]))


def test_trace_format_keys():
    line = dumps_trace(Trace.from_rows([(-1, 1, 0, 0.1)])).strip()
    assert json.loads(line) == {"a": -1, "b": 1, "mu": 0, "x": 0.1}
    assert "0.10000000000000001" in line


BASE = {
    "horizon": 6,
    "forecasts": {"constant": {"a": -1, "b": 1, "mu": 0}},
    "reality": {"kind": "iid", "distribution": "uniform"},
    "sceptic": {"h": "optimal"},
    "event": {"threshold": 0.4},
    "master_seed": 3,
}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


@pytest.mark.parametrize("bad", [
    {**BASE, "horizon": -1},
    {**BASE, "reality": {"kind": "psychic"}},
    {**BASE, "event": {"threshold": 0}},
    {**BASE, "extra": 1},
    {k: v for k, v in BASE.items() if k != "master_seed"},
    {**BASE, "forecasts": [{"a": 0, "b": 1, "mu": 1}] * 6},
    {**BASE, "forecasts": [{"a": 0, "b": 1, "mu": 0.5}] * 5},
    {k: v for k, v in BASE.items() if k != "event"},
])
def test_bad_configs(bad):
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_config_variants():
    cfg = parse_config({**BASE, "forecasts": {"budget": {"C": 2.5}}, "sceptic": {"known_c": 2.5}})
    assert cfg.c_total() == 2.5
    assert cfg.hedge_h() == pytest.approx(4 * 6 * 0.4 / 2.5)
    cfg = parse_config({**BASE, "sceptic": {"h": -0.5}})
    assert cfg.hedge_h() == -0.5
    assert parse_config(BASE, seed=11).reality.seed == 11


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_empty_game(tmp_path, capsys):
    cfg = {"horizon": 0, "forecasts": [], "reality": {"kind": "replay", "outcomes": []}, "sceptic": {"h": 1.0}}
    code, out, _ = _run(["simulate", "--config", _write(tmp_path, cfg), "--out", str(tmp_path / "o")], capsys)
    assert code == 0
    assert json.loads(out)["final_capital"] == 1
    assert (tmp_path / "o" / "trace.jsonl").read_text() == ""


@pytest.mark.parametrize("cfg", [
    BASE,
    {**BASE, "reality": {"kind": "replay", "outcomes": [1, -1, 0.5, 0.25, 0, 1]}},
    {**BASE, "forecasts": {"budget": {"C": 3.0}}, "reality": {"kind": "adversarial_max_sum"}},
])
def test_simulate_byte_deterministic(tmp_path, capsys, cfg):
    path = _write(tmp_path, cfg)
    outputs = []
    for run in range(2):
        d = tmp_path / f"run{run}"
        code, out, _ = _run(["simulate", "--config", path, "--out", str(d)], capsys)
        assert code == 0
        outputs.append((out, (d / "trace.jsonl").read_bytes(), (d / "ledger.jsonl").read_bytes()))
    assert outputs[0] == outputs[1]
    trace, ledger = loads_ledger(outputs[0][2].decode())
    assert trace == loads_trace(outputs[0][1].decode())
    summary = json.loads(outputs[0][0])
    assert summary["final_capital"] == ledger.final
    assert summary["final_capital"] >= summary["floor"] * (1 - 1e-9)


def test_simulate_requires_seed(tmp_path, capsys):
    cfg = {k: v for k, v in BASE.items() if k != "master_seed"}
    code, _, err = _run(["simulate", "--config", _write(tmp_path, cfg), "--out", str(tmp_path)], capsys)
    assert code == 2 and "master_seed" in err


def test_simulate_missing_file(tmp_path, capsys):
    code, _, _ = _run(["simulate", "--config", str(tmp_path / "nope.json")], capsys)
    assert code == 2


def test_verify_default_grid(capsys):
    code, out, _ = _run(["verify"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert rep["h_zero_rows"] > 0 and rep["h_zero_max_abs_slack"] == 0.0


def test_verify_fuzz_needs_seed(capsys):
    code, _, _ = _run(["verify", "--fuzz", "10"], capsys)
    assert code == 2


def test_verify_negative_control(capsys, monkeypatch):
    real = supermartingale.check_goal_inequality
    monkeypatch.setattr(supermartingale, "check_goal_inequality",
                        lambda a, b, h, x: real(a, b, h, x) - 1.0)
    code, _, err = _run(["verify"], capsys)
    assert code == 1
    assert "goal_inequality" in err and "'a'" in err


def test_bound_outputs(capsys):
    code, out, _ = _run(["bound", "--N", "1", "--t", "1", "--C", "4"], capsys)
    assert code == 0 and json.loads(out)["bound"] == pytest.approx(0.606531, abs=1e-6)
    code, out, _ = _run(["bound", "--N", "10", "--t", "0.1", "--widths", ",".join(["1"] * 10)], capsys)
    rep = json.loads(out)
    assert rep["C"] == 10 and rep["bound"] == pytest.approx(0.818731, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ["bound", "--N", "1", "--t", "0", "--C", "4"],
    ["bound", "--N", "1", "--t", "-1", "--C", "4"],
    ["bound", "--N", "1", "--t", "1", "--C", "0"],
])
def test_bound_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_bound_needs_exactly_one_of_c_widths(capsys):
    assert cli.main(["bound", "--N", "1", "--t", "1"]) == 2
    assert cli.main(["bound", "--N", "2", "--t", "1", "--widths", "1"]) == 2


def test_oracle_documented_case(capsys):
    code, out, _ = _run(["oracle", "--N", "1", "--forecast", "-1", "1", "0", "--m", "3", "--t", "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["sandwich"] == "PASS"
    assert rep["upper_probability"] == 0.5
    assert rep["upper_probability"] <= rep["strategy_value"] <= 0.6066
    assert rep["grid"] == [-1.0, 0.0, 1.0]


def test_oracle_impossible_event_and_sweep(capsys):
    code, out, _ = _run(["oracle", "--N", "2", "--forecast", "-1", "1", "0", "--m", "3",
                         "--t", "1", "2", "5", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("N,m,t,upper_probability")
    ups = [float(r.split(",")[3]) for r in lines[1:]]
    assert ups == sorted(ups, reverse=True)
    assert ups[-1] == 0.0 and all(r.endswith("PASS") for r in lines[1:])


def test_oracle_cap_is_usage_error(capsys):
    code, _, err = _run(["oracle", "--N", "7", "--forecast", "-1", "1", "0", "--m", "3", "--t", "1"], capsys)
    assert code == 2 and "N <= 6" in err
    code, _, err = _run(["oracle", "--N", "1", "--forecast", "-1", "1", "0", "--m", "12", "--t", "1"], capsys)
    assert code == 2 and "m <= 9" in err


def test_montecarlo_flags_and_config(tmp_path, capsys):
    argv = ["montecarlo", "--N", "1", "--forecast", "-1", "1", "0", "--t", "0.5",
            "--replicates", "20000", "--seed", "4"]
    code, out, _ = _run(argv, capsys)
    rep = json.loads(out)
    assert code == 0
    assert set(rep) >= {"N", "t", "C", "optimal_h", "bound", "log_bound", "frequency",
                        "stderr", "replicates", "seed"}
    assert abs(rep["frequency"] - 0.25) <= 3 * rep["stderr"]
    code2, out2, _ = _run(argv + ["--jobs", "4"], capsys)
    assert out2 == out
    code, out, _ = _run(["montecarlo", "--config", _write(tmp_path, BASE), "--replicates", "5000"], capsys)
    assert code == 0 and json.loads(out)["seed"] == 3
    assert _run(["montecarlo", "--N", "1", "--forecast", "-1", "1", "0", "--t", "0.5"], capsys)[0] == 2


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "hoeffding_game", "bound", "--N", "1", "--t", "1", "--C", "4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["optimal_h"] == 1.0
