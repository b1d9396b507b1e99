import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hardcore import cli
from hardcore.errors import NumericalError

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *args):
    code = cli.main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 and out else None), err


def test_spectrum_examples(capsys):
    code, doc, _ = run(capsys, "spectrum", "--input", SAMPLES / "triangle.json", "--flavor", "laplacian")
    assert code == 0 and doc["min_eig"] == pytest.approx(0, abs=1e-12)
    assert np.allclose(doc["spectrum_head"], [0, 0, 3], atol=1e-12)
    _, doc, _ = run(capsys, "spectrum", "--input", SAMPLES / "pair_edgeless.json")
    assert doc["spectrum_head"] == [0.0, 0.0]
    _, doc, _ = run(capsys, "spectrum", "--input", SAMPLES / "gadget2.json", "--k", 2)
    assert doc["dim"] == 24


def test_spectrum_iterative_has_no_head(capsys):
    _, doc, _ = run(capsys, "spectrum", "--input", SAMPLES / "gadget2.json", "--k", 2, "--method", "iterative", "--flavor", "laplacian")
    _, ref, _ = run(capsys, "spectrum", "--input", SAMPLES / "gadget2.json", "--k", 2, "--flavor", "laplacian")
    assert doc["spectrum_head"] == [] and doc["min_eig"] == pytest.approx(ref["min_eig"], abs=1e-8)


def test_empty_sector(capsys):
    _, doc, _ = run(capsys, "spectrum", "--input", SAMPLES / "k3.json", "--k", 2)
    assert doc == {"command": "spectrum", "flavor": "fis", "k": 2, "dim": 0, "min_eig": None, "spectrum_head": []}


@pytest.mark.parametrize("name, k, expect", [("c5.json", 2, 1), ("k3.json", 1, 2), ("edgeless3.json", 1, 0)])
def test_homology_examples(capsys, name, k, expect):
    code, doc, _ = run(capsys, "homology", "--input", SAMPLES / name, "--k", k)
    assert code == 0 and doc["betti"] == expect
    assert sum(abs(v) < 1e-9 for v in doc["spectrum_head"]) == expect


@pytest.mark.parametrize(
    "flavor, which, expect",
    [
        ("fis", "vmain", {"II": -10 / 9, "XX": 4 / 9, "ZZ": 4 / 9}),
        ("laplacian", "vmain", {"II": -7 / 12, "XX": 5 / 24, "ZZ": 5 / 24}),
        ("laplacian", "vextra", {"II": 4 / 3, "XX": 1 / 6, "ZZ": 1 / 6}),
    ],
)
def test_effective_examples(capsys, flavor, which, expect):
    code, doc, _ = run(capsys, "effective", which, "--flavor", flavor)
    assert code == 0
    got = {t["word"]: t["coeff"] for t in doc["pauli"]}
    assert got.keys() == expect.keys()
    for w, c in expect.items():
        assert got[w] == pytest.approx(c, abs=1e-9)
    assert np.array(doc["matrix"]).shape == (4, 4)


def test_compile_verify_fis(capsys, tmp_path):
    out = tmp_path / "fis.json"
    code, _, _ = run(capsys, "compile-verify", "--input", SAMPLES / "target_fis2.json", "--output", out, "--deltas", "100,1000,10000")
    assert code == 0
    doc = json.loads(out.read_text())
    errs = [p["error"] for p in doc["points"]]
    assert errs[0] > errs[1] > errs[2]
    csv_rows = out.with_suffix(".csv").read_text().splitlines()
    assert csv_rows[0].startswith("delta,") and len(csv_rows) == 4


def test_compile_verify_empty_target(capsys):
    _, doc, _ = run(capsys, "compile-verify", "--input", SAMPLES / "target_empty.json")
    assert all(p["error"] < 1e-9 for p in doc["points"])
    assert doc["exponent"] is None


def test_compile_verify_three_qubit_laplacian(capsys):
    _, doc, _ = run(capsys, "compile-verify", "--input", SAMPLES / "target_lap3.json")
    assert doc["flavor"] == "laplacian" and doc["n_qubits"] == 3
    assert doc["exponent"] <= -0.4


def test_seventeen_digits():
    assert cli.dumps({"x": 0.1, "y": [1, None, True]}) == '{"x": 0.10000000000000001, "y": [1, null, true]}\n'


def test_parse_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n_modes": 3,\n "edges": [[0, 1],]}')
    code, _, err = run(capsys, "spectrum", "--input", bad)
    assert code == 2 and "line 2" in err
    code, _, _ = run(capsys, "spectrum", "--input", tmp_path / "missing.json")
    assert code == 2
    code, _, _ = run(capsys, "spectrum", "--input", SAMPLES / "k3.json", "--k", 9)
    assert code == 2
    code, _, _ = run(capsys, "compile-verify", "--input", SAMPLES / "target_fis2.json", "--deltas", "100,10,1000")
    assert code == 2
    neg = tmp_path / "neg.json"
    neg.write_text(json.dumps({"n_qubits": 2, "edges": [[0, 1, -1.0]]}))
    code, _, _ = run(capsys, "compile-verify", "--input", neg)
    assert code == 2


def test_size_error(capsys, tmp_path):
    big = tmp_path / "big.json"
    big.write_text(json.dumps({"n_modes": 65, "edges": []}))
    code, _, err = run(capsys, "spectrum", "--input", big)
    assert code == 3 and "65" in err


def test_numeric_errors(capsys, tmp_path, monkeypatch):
    huge = tmp_path / "huge.json"
    huge.write_text(json.dumps({"n_modes": 2, "edges": [[0, 1]], "vertex_weights": [1e300, 1e300]}))
    code, _, _ = run(capsys, "spectrum", "--input", huge, "--flavor", "laplacian")
    assert code == 4

    def stalled(*args, **kwargs):
        raise NumericalError("did not converge", residual=1.0)

    monkeypatch.setattr(cli, "lowest_eigenpairs", stalled)
    code, _, _ = run(capsys, "spectrum", "--input", SAMPLES / "c5.json")
    assert code == 4


def test_byte_identical_runs(tmp_path):
    outs = []
    for n in range(2):
        out = tmp_path / f"run{n}.json"
        subprocess.run(
            [sys.executable, "-m", "hardcore", "compile-verify", "--input", str(SAMPLES / "target_lap2.json"),
             "--output", str(out), "--method", "iterative", "--seed", "7"],
            check=True,
        )
        outs.append((out.read_bytes(), out.with_suffix(".csv").read_bytes()))
    assert outs[0] == outs[1]
