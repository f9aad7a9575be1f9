import csv
import io
import json

import pytest

from kcsp import csp_core
from kcsp.cli import DTEST_CSV_HEADER, main
from kcsp.inequality_lab import CSV_HEADER

WORKED_D21 = {"kind": "d-to-1", "d": 2, "V": 1, "W": 1, "N": 6,
              "edges": [{"v": 0, "w": 0, "map": [1, 3, 2, 1, 3, 2]}]}


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_gen_then_brute_gives_fixture(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    rep = run_json(capsys, "gen", "csp", "--n", 6, "--R", 3, "--k", 2, "--m", 10, "--seed", 42, "-o", inst)
    assert "instance" not in rep["result"]
    assert csp_core.load(inst).m == 10
    rep = run_json(capsys, "solve", "--algo", "brute", inst)
    assert rep["result"]["value"] == pytest.approx(0.8, abs=1e-12)
    assert rep["result"]["assignment"] == [0, 1, 1, 1, 0, 0]
    assert len(rep["config"]["input_sha256"]["input"]) == 64


def test_gen_without_output_echoes_artifact(capsys):
    rep = run_json(capsys, "gen", "csp", "--n", 3, "--R", 2, "--k", 2, "--m", 2, "--seed", 1)
    assert rep["result"]["instance"]["n"] == 3


def test_dtest_dictator_exact_half(capsys):
    rep = run_json(capsys, "dtest", "--function", "dictator", "--n", 3, "--R", 3, "--k", 2, "--rho", 0.5, "--mode", "exact")
    assert rep["result"]["acceptance"] == pytest.approx(0.5, abs=1e-12)
    assert rep["result"]["closed_form"] == pytest.approx(0.5, abs=1e-12)
    assert rep["seed"] == 0 and rep["config"]["resolved"]["rho"] == 0.5


def test_reduce_d21_worked_example(tmp_path, capsys):
    src, dst = tmp_path / "game.json", tmp_path / "ug.json"
    src.write_text(json.dumps(WORKED_D21))
    run_json(capsys, "reduce", "d21", src, "-o", dst)
    m = json.loads(dst.read_text())["edges"][0]["map"]
    assert (m[1], m[4]) == (5, 6)


def test_solve_extend_and_naive(tmp_path, capsys):
    inst = tmp_path / "i.json"
    run(capsys, "gen", "csp", "--n", 5, "--R", 2, "--k", 3, "--m", 6, "--seed", 3, "-o", inst)
    rep = run_json(capsys, "solve", "--algo", "extend", inst, "--seed", 4)
    assert rep["config"]["resolved"]["kprime"] == 2
    assert 0 <= rep["result"]["value"] <= 1
    assert rep["result"]["guarantee_factor"] == pytest.approx(4 / 9)
    rep = run_json(capsys, "solve", "--algo", "naive", inst)
    assert len(rep["result"]["assignment"]) == 5


def test_ug2csp_and_lab_commands(tmp_path, capsys):
    game = tmp_path / "g.json"
    run(capsys, "gen", "ug", "--V", 2, "--W", 2, "--N", 3, "--edges", 4, "--satisfiable", "--seed", 1, "-o", game)
    rep = run_json(capsys, "reduce", "ug2csp", game, "--k", 2, "--R", 3, "--rho", 0.5)
    assert rep["result"]["instance"]["n"] == 2 * 9
    rep = run_json(capsys, "lab", "hyper", "--m", 4, "--count", 5)
    assert rep["result"]["violations"] == 0 and rep["result"]["count"] == 5
    rep = run_json(capsys, "lab", "invariance", "--count", 2)
    assert rep["result"]["reports"][0]["params"]["psi"] == "psi1"
    rep = run_json(capsys, "lab", "mainlemma", "--count", 2, "--R", 3)
    assert rep["result"]["reports"][0]["aux"]["mean"] == pytest.approx(1 / 3)


@pytest.mark.parametrize("argv", [
    ("solve", "/nonexistent.json"),
    ("gen", "csp", "--n", 2, "--R", 1, "--k", 2, "--m", 1),
    ("dtest", "--bogus"),
    ("dtest", "--workers", 0, "--mode", "mc"),
    ("dtest", "--function", "file"),
    ("nosuch",),
    ("lab", "hyper", "--p", 4, "--q", 2),
])
def test_validation_exit_one(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    assert err.startswith("error: ") and err.count("\n") == 1


def test_malformed_file_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "R": 2, "constraints": [{"scope": [0, 5], "predicate": [1, 0, 0, 1], "weight": 1.0}]}))
    code, _, err = run(capsys, "solve", bad)
    assert code == 1 and "constraint 0" in err and "variable 5" in err


def test_budget_exit_two(tmp_path, capsys):
    inst = tmp_path / "i.json"
    run(capsys, "gen", "csp", "--n", 10, "--R", 3, "--k", 2, "--m", 4, "-o", inst)
    code, _, err = run(capsys, "solve", inst, "--budget", 100)
    assert code == 2 and "budget" in err


def test_verify_passes(capsys):
    rep = run_json(capsys, "verify", "--trials", 20000, "--seed", 3)
    names = {c["name"] for c in rep["result"]["checks"]}
    assert {"dictator_closed_form", "csp_vs_verifier_honest", "completeness_floor"} <= names
    assert rep["result"]["passed"]


def test_replay_mismatch_exit_three(tmp_path, capsys):
    rep = run_json(capsys, "dtest", "--function", "random", "--n", 2, "--mode", "mc", "--trials", 1000, "--seed", 5)
    rep["result"]["acceptance"] += 0.01
    path = tmp_path / "r.json"
    path.write_text(json.dumps(rep))
    code, out, _ = run(capsys, "replay", path)
    assert code == 3
    assert json.loads(out)["differences"] == ["acceptance"]


@pytest.mark.parametrize("workers", [1, 4])
def test_replay_identical_across_workers(tmp_path, capsys, workers):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "dtest", "--function", "random", "--n", 2, "--mode", "mc",
                     "--trials", 50000, "--seed", 5, "-o", path)
    assert code == 0
    code, out, _ = run(capsys, "replay", path, "--workers", workers)
    assert code == 0 and json.loads(out)["identical"]


def test_dtest_csv_schema(capsys):
    code, out, _ = run(capsys, "dtest", "--function", "dictator", "--R", 3, "--rho", 0.5, "--format", "csv", "--quasirandom")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and tuple(rows[0]) == DTEST_CSV_HEADER and len(rows) == 2
    row = dict(zip(rows[0], rows[1]))
    assert float(row["acceptance"]) == pytest.approx(0.5)
    assert row["quasirandom"] == "False" and float(row["max_influence"]) > 0


def test_lab_csv_schema(capsys):
    code, out, _ = run(capsys, "lab", "hyper", "--m", 3, "--count", 3, "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and tuple(rows[0]) == CSV_HEADER and len(rows) == 4
    assert all(float(r[4]) >= -1e-12 for r in rows[1:])


def test_key_value_csv(capsys):
    code, out, _ = run(capsys, "gen", "csp", "--n", 3, "--R", 2, "--k", 2, "--m", 2, "--format", "csv")
    rows = dict(csv.reader(io.StringIO(out)))
    assert code == 0 and rows["key"] == "value" and json.loads(rows["seed"]) == 0
    assert json.loads(rows["result.n"]) == 3


def test_report_written_to_file(tmp_path, capsys):
    path = tmp_path / "rep.json"
    code, out, _ = run(capsys, "dtest", "-o", path)
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["command"] == "dtest"
