from __future__ import annotations

import json
import random

import pytest

from plusspace.cli import ANCHORS, main
from plusspace.cyclotomic import ONE
from plusspace.expansions import PlusExpansion, jacobi_of_plus
from plusspace.field import RATIONAL
from plusspace.samples import random_plus_expansion
from plusspace.serialize import dumps, expansion_json
from plusspace.symmat import half_int


@pytest.fixture
def files(tmp_path):
    h = random_plus_expansion(RATIONAL, 1, 12, random.Random(2))
    bad = PlusExpansion(RATIONAL, 1, (1,), {half_int(RATIONAL, [[1]]): ONE}, 12, -1)
    paths = {}
    for name, obj in (("h", h), ("bad", bad), ("g", jacobi_of_plus(h))):
        p = tmp_path / f"{name}.json"
        p.write_text(dumps(expansion_json(obj)))
        paths[name] = str(p)
    broken = tmp_path / "broken.json"
    broken.write_text('{"kind": "plus",\n"m": 1,,}')
    paths["broken"] = str(broken)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_plus_check_ok_and_fail(capsys, files):
    code, rep, _ = run(capsys, "plus-check", files["h"])
    assert code == 0 and rep["status"] == "ok"
    assert all(w["lambda"] is not None for w in rep["payload"]["witnesses"])
    code, rep, _ = run(capsys, "plus-check", files["bad"])
    assert code == 1 and rep["status"] == "fail"
    assert any("T=1" in c["detail"] for c in rep["certificates"] if not c["passed"])


@pytest.mark.parametrize("cmd", ["split", "jacobi-of-plus", "compose-theta"])
def test_coefficient_commands(capsys, files, cmd):
    code, rep, _ = run(capsys, cmd, files["h"])
    assert code == 0 and all(c["passed"] for c in rep["certificates"])


def test_plus_of_jacobi(capsys, files):
    code, rep, _ = run(capsys, "plus-of-jacobi", files["g"])
    assert code == 0 and rep["payload"]["kind"] == "plus"


def test_enumeration_and_keys(capsys):
    code, rep, _ = run(capsys, "enumerate-T", "--m", "2", "--bound", "1")
    assert code == 0 and rep["payload"]["count"] == 3
    code, rep, _ = run(capsys, "normalize-key", "--m", "2", '[["1","1/2"],["1/2","1"]]', '["1","1"]')
    assert rep["payload"] == {"T": [["3", "1"], ["1", "3"]], "lambda": ["1", "1"]}
    code, rep, _ = run(capsys, "normalize-key", "--inverse", '[["3"]]', '["1"]')
    assert code == 0 and rep["payload"] == {"N": [["1"]], "r": ["1"]}


def test_classical_plus_listing(capsys):
    code, rep, _ = run(capsys, "plus-check", "--bound", "30")
    assert code == 0
    assert [int(T[0][0]) for T in rep["payload"]["accepted"]] == [n for n in range(31) if n % 4 in (0, 3)]


def test_eval_and_transform(capsys, files):
    code, rep, _ = run(capsys, "eval", files["h"], "--z", "1j", "--w", "0.1")
    assert code == 0
    code, rep, _ = run(capsys, "theta-transform", "--field", "Q(sqrt5)", "--seed", "1")
    assert code == 0 and float(rep["payload"]["residual_upper"]) <= 1e-6


@pytest.mark.parametrize("argv", [
    ["weil", "matrix"], ["weil", "matrix", "--word", '[{"op":"w"}]'], ["weil", "character", "--count", "5"],
    ["weil", "relation", "--count", "5"], ["weil", "gauss", "--count", "3", "--level", "1"],
    ["weil", "commutant"], ["weil", "closure"], ["weil", "idempotent"], ["weil", "key-lemma"],
    ["weil", "index"], ["weil", "index", "--a", '"3"'], ["weil", "gauss", "--S", '[["1"]]'],
])
def test_weil_commands(capsys, argv):
    code, rep, _ = run(capsys, *argv)
    assert code == 0, rep
    assert rep["certificates"] and all(c["anchor"] for c in rep["certificates"])


def test_idempotent_reports_order(capsys):
    code, rep, _ = run(capsys, "weil", "idempotent", "--local", "q2", "--m", "1")
    assert code == 0 and rep["payload"]["order"] == 96
    assert {c["name"] for c in rep["certificates"]} >= {"idempotent", "big_ek"}


def test_usage_and_format_errors(capsys, files):
    code, rep, _ = run(capsys, "plus-check", files["broken"])
    assert code == 2 and rep["status"] == "error" and rep["error"]["line"] == 2
    code, rep, _ = run(capsys, "weil", "matrix", "--local", "q3")
    assert code == 2
    code, rep, _ = run(capsys, "frobnicate")
    assert code == 2
    code, rep, _ = run(capsys, "weil", "matrix", "--word", '[{"op":"usharp","B":[["1/2"]]}]', "--level", "1")
    assert code == 2 and rep["error"]["type"] == "NotInGroup"


def test_cap_exceeded_is_a_failure(capsys):
    code, rep, _ = run(capsys, "weil", "closure", "--cap", "10")
    assert code == 1


def test_outputs_are_byte_deterministic(capsys, files, tmp_path):
    for argv in (["jacobi-of-plus", files["h"]], ["weil", "character", "--count", "4", "--seed", "3"]):
        a = run(capsys, *argv)[2]
        b = run(capsys, *argv)[2]
        assert a == b
    out = tmp_path / "r.json"
    assert main(["split", files["h"], "--out", str(out)]) == 0
    assert out.read_text() == run(capsys, "split", files["h"])[2]


def test_anchor_table_is_complete():
    assert all(isinstance(v, str) and v for v in ANCHORS.values())


def test_reports_chain_as_inputs(capsys, files, tmp_path):
    out = tmp_path / "g_report.json"
    assert main(["jacobi-of-plus", files["h"], "--out", str(out)]) == 0
    code, rep, _ = run(capsys, "plus-of-jacobi", str(out))
    assert code == 0
    assert dumps(rep["payload"]) == open(files["h"]).read()
