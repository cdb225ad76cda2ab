from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from skewstc.cli import (AnalysisConfig, UserError, global_field_order, group_from_descriptor, main, parse_input,
                         run_command, serialize)

from conftest import FIXTURES

GOLDEN = Path(__file__).resolve().parent / "golden"
ALL_GOOD = sorted(p.stem for p in FIXTURES.glob("*.json") if not p.stem.startswith("negative_")
                  or p.stem == "negative_minus_identity")


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(p.stem for p in GOLDEN.glob("*.txt")))
def test_golden_text(name, capsys):
    code, out, _ = _run(capsys, str(FIXTURES / f"{name}.json"))
    assert code == 0
    assert out == (GOLDEN / f"{name}.txt").read_text()


@pytest.mark.parametrize("name", ALL_GOOD)
def test_fixture_runs(name, capsys):
    code, out, err = _run(capsys, str(FIXTURES / f"{name}.json"), "--json")
    assert code == 0, err
    data = json.loads(out)
    reports = data if isinstance(data, list) else [data]
    assert all(r["schema_version"] == 1 for r in reports)


@pytest.mark.parametrize("name", ALL_GOOD)
def test_round_trip(name):
    spec = parse_input((FIXTURES / f"{name}.json").read_text())
    text = serialize(spec)
    again = parse_input(text)
    assert again == spec
    assert serialize(again) == text


def test_user_errors(capsys):
    code, _, err = _run(capsys, str(FIXTURES / "negative_swap_kq.json"))
    assert code == 1 and "generators[0]: generator is not a graded automorphism" in err
    code, _, err = _run(capsys, str(FIXTURES / "negative_zero_parameter.json"))
    assert code == 1 and "parameter must be nonzero (p_12 = 0)" in err
    code, _, err = _run(capsys, "/nonexistent/file.json", "--cmd", "hilbert")
    assert code == 1 and "cannot read" in err
    code, _, err = _run(capsys, "--cmd", "hilbert")
    assert code == 1 and "needs a problem file" in err
    code, _, err = _run(capsys, str(FIXTURES / "circle_m312.json"), "--cmd", "frobnicate")
    assert code == 1 and "unknown command" in err


def test_parse_errors():
    with pytest.raises(UserError, match="invalid JSON"):
        parse_input("{")
    with pytest.raises(UserError, match="ring"):
        parse_input({"schema_version": 1})
    with pytest.raises(UserError, match="schema_version"):
        parse_input({"schema_version": 2, "ring": {"kind": "skew", "n": 2, "p": -1}})
    with pytest.raises(UserError, match="working_order"):
        parse_input({"field": {"working_order": 6}, "ring": {"kind": "skew", "n": 2, "p": -1}})
    with pytest.raises(UserError, match="generators\\[0\\]"):
        parse_input({"ring": {"kind": "skew", "n": 2, "p": -1}, "generators": [{"rotate": 1}]})


def test_field_rule():
    assert global_field_order({"ring": {}}) == 4
    assert global_field_order({"field": {"root_of_unity_order": 3}, "ring": {}}) == 12
    assert global_field_order({"field": {"root_of_unity_order": 4}, "ring": {}}) == 8
    doc = {"ring": {"kind": "skew", "n": 2, "p": {"zeta_exp": 1, "order": 5}}}
    assert global_field_order(doc) == 20
    assert global_field_order({"field": {"working_order": 24}, "ring": {}}) == 24


def test_limits_precedence(monkeypatch, capsys):
    base = AnalysisConfig(9, 100)
    assert base.overridden(env={}).max_degree == 9
    assert base.overridden(env={"SKEWSTC_MAX_DEGREE": "5"}).max_degree == 5
    assert base.overridden(3, env={"SKEWSTC_MAX_DEGREE": "5"}).max_degree == 3
    assert base.overridden(env={"SKEWSTC_MAX_ORDER": "7"}).max_group_order == 7
    monkeypatch.setenv("SKEWSTC_MAX_ORDER", "10")
    code, _, err = _run(capsys, str(FIXTURES / "circle_m312.json"), "--cmd", "decide-stc")
    assert code == 1 and "exceeds" in err
    code, _, _ = _run(capsys, str(FIXTURES / "circle_m312.json"), "--cmd", "decide-stc", "--max-order", "100")
    assert code == 0
    monkeypatch.setenv("SKEWSTC_MAX_DEGREE", "4")
    code, out, _ = _run(capsys, str(FIXTURES / "circle_m312.json"), "--cmd", "hilbert", "--max-order", "100")
    assert "series 1,0,1,1,2 " in out


def test_trace_command(capsys):
    spec = parse_input((FIXTURES / "circle_m312.json").read_text())
    rep = run_command(spec, "trace g=1", AnalysisConfig(6))
    assert rep["series"] == [1, 1, 2, 2, 3, 3, 4]
    with pytest.raises(UserError):
        run_command(spec, "trace g=3", AnalysisConfig(6))
    with pytest.raises(UserError):
        run_command(spec, "trace first", AnalysisConfig(6))


def test_fileless_commands(capsys):
    rep = run_command(None, "compare-orders M(3,1,2) G(2,2,3)")
    assert rep["group_orders"] == [24, 24] and rep["first_differing_order"] is None
    rep = run_command(None, "mgroup 3 1 4")
    assert rep["group_order"] == 96
    with pytest.raises(UserError):
        group_from_descriptor("H(1,2,3)")


def test_deterministic_json(capsys):
    argv = [str(FIXTURES / "dicyclic_m3.json"), "--json"]
    first = _run(capsys, *argv)[1]
    assert _run(capsys, *argv)[1] == first


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "skewstc", "--cmd", "mgroup 2 1 2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "[mgroup]" in res.stdout
