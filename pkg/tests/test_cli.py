import json
from pathlib import Path

import numpy as np
import pytest

from ncschur.cli import main

DATA = Path(__file__).resolve().parents[1] / "demos" / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def coeff(series, w):
    v = series["coeffs"].get(w)
    return 0.0 if v is None else complex(*v[0][0])


def test_expand_shift(capsys):
    code, rep, err = run(capsys, "expand", "--colligation", DATA / "shift.json", "--degree", 4)
    assert code == 0 and "expand: ok" in err
    assert list(rep["result"]["coeffs"]) == ["1"]
    assert set(rep) >= {"command", "args", "seed", "result", "residuals", "flags", "timings"}


def test_blax_blaschke(capsys):
    code, rep, _ = run(capsys, "blax", "--pair", DATA / "blaschke.json", "--degree", 8)
    assert code == 0
    theta = rep["result"]["theta"]
    got = [coeff(theta, "1" * k) for k in range(4)]
    assert np.allclose(got, [-0.5, 0.75, 0.375, 0.1875], atol=1e-12)
    assert rep["flags"]["inner"] and rep["flags"]["subspace"]


def test_check_is_deterministic(capsys):
    code, first, _ = run(capsys, "check", "--seed", 42, "--degree", 4, "--d", 2)
    assert code == 0 and first["flags"]["passed"]
    _, second, _ = run(capsys, "check", "--seed", 42, "--degree", 4, "--d", 2)
    first.pop("timings"), second.pop("timings")
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_round_trip(capsys, tmp_path):
    _, rep, _ = run(capsys, "expand", "--colligation", DATA / "row_shift.json", "--degree", 4)
    series = tmp_path / "series.json"
    series.write_text(json.dumps(rep))
    code, model, _ = run(capsys, "dbr", "--series", series, "--degree", 4)
    assert code == 0 and model["flags"]["passed"]
    coll = tmp_path / "model.json"
    coll.write_text(json.dumps(model))
    _, back, _ = run(capsys, "expand", "--colligation", coll, "--degree", 3)
    for w, v in rep["result"]["coeffs"].items():
        if len(w) <= 3:
            a = np.array(v)[..., 0] + 1j * np.array(v)[..., 1]
            b = back["result"]["coeffs"].get(w)
            b = 0 if b is None else np.array(b)[..., 0] + 1j * np.array(b)[..., 1]
            assert np.max(np.abs(a - b)) <= 1e-8


def test_kernel_and_classify(capsys):
    code, rep, _ = run(capsys, "kernel", "--colligation", DATA / "row_shift.json", "--degree", 2)
    assert code == 0 and rep["flags"]["positive"]
    code, rep, _ = run(capsys, "classify", "--colligation", DATA / "shift.json")
    assert code == 0 and rep["flags"]["unitary"]


def test_simulate(capsys):
    code, rep, _ = run(capsys, "simulate", "--colligation", DATA / "shift.json",
                       "--input", DATA / "impulse.json", "--degree", 3)
    assert code == 0
    assert rep["result"]["1"] == [[1.0, 0.0]] and rep["result"][""] == [[0.0, 0.0]]


def test_indefinite_kernel_exits_one(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"d": 1, "degree": 3, "rows": 1, "cols": 1,
                                "coeffs": {"1": [[[2.0, 0.0]]]}}))
    code, rep, _ = run(capsys, "kernel", "--series", path)
    assert code == 1 and not rep["flags"]["positive"]
    code, rep, err = run(capsys, "dbr", "--series", path)
    assert code == 1 and rep["error"]["type"] == "NotContractiveError"


@pytest.mark.parametrize("content", ["{not json", json.dumps({"d": 1})])
def test_malformed_input_exits_two(capsys, tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, rep, err = run(capsys, "expand", "--colligation", path)
    assert code == 2 and rep is None and "error" in err


def test_missing_file_and_bad_flags(capsys):
    assert run(capsys, "expand", "--colligation", "/nonexistent.json")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
