import json
import re
from importlib import resources

import jsonschema
import pytest
from click.testing import CliRunner

from flopkit.cli import load_shadow_input, main

SCHEMA = json.loads(resources.files("flopkit").joinpath("data/output.schema.json").read_text())


def run(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env)


def run_json(*args):
    r = run(*args, "--output", "json")
    doc = json.loads(r.output)
    jsonschema.validate(doc, SCHEMA)
    return r, doc


@pytest.mark.parametrize("args, dim", [
    (["--which", "lambda_con", "--k", "1", "--field", "q"], 6),
    (["--which", "gamma_con", "--k", "4", "--field", "p:3"], 9),
    (["--which", "truncated", "--k", "2"], 10),
])
def test_algebra_info(args, dim):
    r = run("algebra", "info", *args)
    assert r.exit_code == 0, r.output
    assert f"dim: {dim}" in r.output


def test_truncated_matches():
    assert "matches lambda_con: true" in run("algebra", "info", "--which", "truncated", "--k", "2").output


@pytest.mark.parametrize("args", [
    ["algebra", "info", "--which", "lambda_con", "--k", "0"],
    ["algebra", "info", "--which", "lambda_con", "--k", "1", "--field", "p:4"],
    ["algebra", "info", "--which", "nope", "--k", "1"],
    ["nccr", "verify", "--n", "1", "--degree", "999"],
    ["classify", "--k", "2"],
    ["classify", "--word", "P7"],
    ["bricks", "--output", "dot"],
])
def test_usage_errors_exit_2(args):
    assert run(*args).exit_code == 2


def test_bad_thread_env():
    assert run("bricks", env={"FLOPKIT_THREADS": "zero"}).exit_code == 2


def test_homtable_golden_bytes():
    r = run("homtable", "--k", "1")
    golden = resources.files("flopkit").joinpath("data/homtable_k1.txt").read_text()
    assert r.exit_code == 0
    assert r.output == "".join(l for l in golden.splitlines(keepends=True) if not l.startswith("#"))
    assert run("homtable", "--k", "1").output == r.output


def test_ar_dot():
    r = run("ar", "--k", "1", "--dot")
    assert r.exit_code == 0
    nodes = re.findall(r"^\s*(n\d+) \[label=", r.output, re.M)
    assert len(nodes) == 6
    edges = re.findall(r"^\s*(n\d+) -> (n\d+)", r.output, re.M)
    assert all(a in nodes and b in nodes for a, b in edges)
    assert r.output.count("{") == r.output.count("}") == 1


def test_bricks_k3():
    r, doc = run_json("bricks", "--k", "3")
    assert r.exit_code == 0 and doc["result"]["count"] == 4


def test_orthogonality_gamma():
    r, doc = run_json("orthogonality", "--k", "2", "--which", "gamma_con")
    assert doc["ok"] and r.exit_code == 0


def test_nccr_verify_n1():
    r = run("nccr", "verify", "--n", "1", "--field", "q")
    assert r.exit_code == 0 and "all pass" in r.output
    assert "FAIL" not in r.output


def test_nccr_verify_n3_part3():
    r, doc = run_json("nccr", "verify", "--n", "3", "--field", "p:5")
    assert r.exit_code == 0
    assert doc["result"]["part3_t_values"] == [0, 1]


def test_nccr_verify_n0_resolutions_only():
    r = run("nccr", "verify", "--n", "0", "--field", "p:3")
    assert r.exit_code == 0 and "resolution checks only" in r.output


def test_ext_hilbert():
    r = run("nccr", "ext-hilbert", "--n", "2", "--field", "p:5")
    assert r.exit_code == 0 and r.output.strip() == "2 2 2 2"


def test_classify_m1_seed():
    r = run("classify", "--k", "1", "--word", "", "--seed-object", "M1")
    assert r.exit_code == 0
    assert "normal form: M1[0]" in r.output
    assert "simple: S1 via Φ2" in r.output


def test_classify_round_trip_json():
    r, doc = run_json("classify", "--k", "1", "--word", "P1 P1")
    assert r.exit_code == 0 and doc["result"]["round_trip"]


def test_classify_random_is_seeded():
    a = run("classify", "--random-length", "5", "--seed", "11", "--field", "p:5").output
    b = run("classify", "--random-length", "5", "--seed", "11", "--field", "p:5").output
    assert a == b


def test_reduce_chain_level(tmp_path):
    f = tmp_path / "x.json"
    f.write_text('[[-1, ["S2"]], [0, ["M1"]]]')
    r, doc = run_json("reduce", "--input", str(f))
    assert r.exit_code == 0 and doc["result"]["round_trip"]


def test_reduce_negative_ext(tmp_path):
    f = tmp_path / "x.json"
    f.write_text('[[0, ["S1"]], [1, ["M1"]], [2, ["S2"]]]')
    r = run("reduce", "--input", str(f))
    assert r.exit_code == 2 and "negative self-extensions" in r.output


def test_reduce_shadow_flags(tmp_path):
    f = tmp_path / "shadow.json"
    f.write_text('[[0, ["S1"]], [1, ["S2"]]]')
    r, doc = run_json("reduce", "--shadow", "--k", "3", "--input", str(f))
    assert r.exit_code == 0
    assert doc["result"]["ambiguous"]
    assert doc["result"]["steps"][0]["flag"] == "AMBIGUOUS"


def test_reduce_k2_needs_shadow(tmp_path):
    f = tmp_path / "x.json"
    f.write_text('[[0, ["S1"]]]')
    assert run("reduce", "--k", "2", "--input", str(f)).exit_code == 2


def test_shadow_input_formats(tmp_path):
    f = tmp_path / "x.json"
    f.write_text('{"0": ["M2", "S1^2"], "1": [["S2", 3]]}')
    assert load_shadow_input(str(f)) == {0: ["M2", "S1", "S1"], 1: ["S2", "S2", "S2"]}
    f.write_text('[[0, [42]]]')
    with pytest.raises(ValueError):
        load_shadow_input(str(f))


def test_failed_check_exits_1(monkeypatch):
    from flopkit import fdrep
    real = fdrep.hom_table
    monkeypatch.setattr(fdrep, "hom_table", lambda A: [row[::-1] for row in real(A)])
    r = run("homtable", "--k", "1")
    assert r.exit_code == 1
