import io
import json

import pytest

from seifertpmhs.cli import main

P1_SPEC = json.dumps({"m": 0, "spec": [[1, 1, 1, 1]]})
MIXED = json.dumps({"m": 1, "spec": [[1, 0, "1/3", 1], [0, 1, "2/3", 1], [1, 1, "1/2", 1]], "seed": 4})
RAW_1DIM = json.dumps({"m": 0, "M": [[1]], "S": [[1]], "F": {"0": [[1]], "1": []}})


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_examples(capsys):
    code, out, _ = run(capsys, "classify", "--seifert", "[[1,0],[2,1]]")
    assert code == 0 and out.strip() == "Seif(-1,1,2,1) x1"
    code, out, _ = run(capsys, "classify", "[[1]]")
    assert code == 0 and out.strip() == "Seif(1,1,1,1) x1"
    code, out, _ = run(capsys, "classify", "--json", "[[0,-42],[42,-21]]")
    assert json.loads(out)["decomposition"] == [{"type": "Seif(-1,1,2,-1)", "mult": 1}]


def test_classify_triple(capsys):
    code, out, _ = run(capsys, "classify", "--triple", '{"S": [[1]], "M": [[1]], "sym": 0}')
    assert code == 0 and out.strip() == "Tr(1,1,1,1) x1"


def test_classify_bad_input(capsys):
    assert run(capsys, "classify", "[[1,1],[1,1]]")[0] == 2
    assert run(capsys, "classify", "[[1,2,3]]")[0] == 2
    assert run(capsys, "classify", "{not json")[0] == 2
    assert run(capsys, "classify", "--triple", '{"S": [[1]]}')[0] == 2


def test_fixture_pipe_classify(capsys, monkeypatch):
    code, out, _ = run(capsys, "fixture", "p1-mirror", "--json")
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(out))
    code, out2, _ = run(capsys, "classify", "-")
    assert code == 0 and out2.strip() == "Seif(-1,1,2,1) x1"


def test_fixture_errors(capsys):
    assert run(capsys, "fixture", "t-pqr:3,3,3")[0] == 2
    assert run(capsys, "fixture", "nope")[0] == 2


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--json", P1_SPEC)
    assert code == 0
    assert json.loads(out)["spectral_pairs"] == [[-1, 1, 1, 1], [0, 1, -1, 1]]
    code, out, _ = run(capsys, "spectrum", "--json", RAW_1DIM)
    assert json.loads(out)["spectral_pairs"] == [[0, 1, 0, 1]]


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", MIXED)
    assert code == 0 and out.startswith("pmhs: ok")
    code, out, _ = run(capsys, "verify", RAW_1DIM)
    assert code == 1 and "[FAIL] S_symmetry" in out


def test_verify_corrupted_S(capsys):
    # negating S on a valid fixture breaks positivity only
    code, out, _ = run(capsys, "fixture", "--json", "a1")
    pm = json.loads(out)["pmhs"]
    assert run(capsys, "verify", json.dumps(pm))[0] == 0
    pm["S"] = [[-x for x in row] for row in pm["S"]]
    code, out, _ = run(capsys, "verify", "--json", json.dumps(pm))
    rep = json.loads(out)
    assert code == 1
    failed = [c["name"] for c in rep["reports"]["pmhs"]["checks"] if not c["passed"]]
    assert "positivity" in failed


def test_twist(capsys):
    code, out, _ = run(capsys, "twist", "--json", "--check", P1_SPEC)
    assert code == 0 and json.loads(out)["check"]["ok"]
    code, out, _ = run(capsys, "twist", "--times", "2", "--check", MIXED)
    assert code == 0 and "check: ok" in out


def test_suspend_and_tensor(capsys):
    code, out, _ = run(capsys, "suspend", "--json", "p1-mirror")
    doc = json.loads(out)
    assert code == 0 and doc["m"] == 1 and doc["classification"] == [{"type": "Seif(-1,1,2,1)", "mult": 1}]
    code, out, _ = run(capsys, "tensor", "--json", "p1-mirror", "a1")
    doc = json.loads(out)
    assert code == 0 and doc["mu"] == 2 and doc["m"] == 1
    code, out, _ = run(capsys, "tensor", "--json", "t-pqr:2,3,7", "p1-mirror")
    assert code == 0 and json.loads(out)["mu"] == 4


def test_tensor_tier_mismatch(capsys):
    lat_only = json.dumps({"L": [[1, 0], [2, 1]], "m": 0})
    assert run(capsys, "tensor", lat_only, "a1")[0] == 2
    assert run(capsys, "tensor", "--drop-analytic", lat_only, "a1")[0] == 0


def test_fl_check(capsys):
    assert run(capsys, "fl-check", "a1")[0] == 0
    assert run(capsys, "fl-check", P1_SPEC)[0] == 0
    lat = {"kind": "lattice", "m": 1, "M": [[1, 0], [1, 1]],
           "generators": [[{"A": [1, 0], "alpha": 0}], [{"A": [0, 1], "alpha": 1, "poly": [1, 2]}]]}
    code, out, _ = run(capsys, "fl-check", "--json", json.dumps(lat))
    assert code == 0 and json.loads(out)["ok"]


def test_deterministic_and_lossless(capsys):
    a = run(capsys, "fixture", "--json", "t-pqr:2,3,7")[1]
    b = run(capsys, "fixture", "--json", "t-pqr:2,3,7")[1]
    assert a == b
    doc = json.loads(a)
    assert doc["L"] == [[0, -42], [42, -21]]
    again = json.loads(run(capsys, "classify", "--json", json.dumps({"L": doc["L"]}))[1])
    assert again["decomposition"] == [{"type": "Seif(-1,1,2,-1)", "mult": 1}]


def test_tolerance_env(capsys, monkeypatch):
    monkeypatch.setenv("SEIFERT_TOL", "abc")
    assert run(capsys, "classify", "[[1]]")[0] == 2
    monkeypatch.setenv("SEIFERT_TOL", "1e-8")
    assert run(capsys, "classify", "[[1]]")[0] == 0
    assert run(capsys, "classify", "--tol", "-1", "[[1]]")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys)[0] == 2


@pytest.mark.parametrize("cmd", ["classify", "spectrum", "verify", "tensor", "suspend", "twist", "fixture", "fl-check"])
def test_help(capsys, cmd):
    assert run(capsys, cmd, "--help")[0] == 0
