import json
import math
import subprocess
import sys

import pytest

from circulant_manifold import connection, fundamental
from circulant_manifold.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_w0(capsys):
    code, out, _ = run(capsys, "classify", "--metric", "builtin:w0")
    doc = json.loads(out)
    assert code == 0
    assert doc["most_specific"] == "W0"
    assert doc["schema_version"] == 1 and doc["command"] == "classify"
    assert doc["classes"]["nablaQ0"]["verdict"] == "fails"
    assert doc["lattice_consistent"] and doc["indeterminate"] == []
    assert all(c["passed"] for c in doc["cross_checks"].values())


def test_classify_w2_more_samples(capsys):
    code, out, _ = run(capsys, "classify", "--metric", "builtin:w2", "--samples", "200")
    doc = json.loads(out)
    assert code == 0 and doc["most_specific"] == "W2" and doc["samples"] == 200
    assert doc["theta_max"] < 1e-9


def test_classify_const_override(capsys):
    code, out, _ = run(capsys, "classify", "--metric", "builtin:w6bar",
                       "--const", "a=5", "--const", "c=4", "--samples", "20")
    doc = json.loads(out)
    assert code == 0 and doc["most_specific"] == "W6bar"
    assert doc["metric"]["constants"] == {"a": 5.0, "b": 1.0, "c": 4.0}


def test_classify_box_and_json_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "classify", "--metric", "builtin:w0", "--box", "2:3",
                       "--samples", "10", "--json", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc == json.loads(out)
    assert doc["box"] == [[2.0, 3.0]] * 4


def test_reports_byte_identical(capsys):
    first = run(capsys, "classify", "--metric", "builtin:w1", "--samples", "30")[1]
    second = run(capsys, "classify", "--metric", "builtin:w1", "--samples", "30")[1]
    assert first == second


def test_metric_file(capsys, tmp_path):
    path = tmp_path / "flat.mspec"
    path.write_text("A = 5\nB = 1\nC = 3\nbox: 0:1\n")
    code, out, _ = run(capsys, "classify", "--metric", str(path), "--samples", "5")
    doc = json.loads(out)
    assert code == 0 and doc["most_specific"] == "W0"
    assert doc["classes"]["nablaQ0"]["verdict"] == "holds"


@pytest.mark.parametrize("argv, match", [
    (["classify", "--metric", "missing.mspec"], "cannot read"),
    (["classify", "--metric", "builtin:nope"], "no builtin"),
    (["classify", "--metric", "builtin:w0", "--const", "a"], "name=value"),
    (["classify", "--metric", "builtin:w0", "--const", "a=1"], "unknown constant"),
    (["classify", "--metric", "builtin:w0", "--samples", "0"], "at least 1"),
    (["classify", "--metric", "builtin:w0", "--box", "0:0.5", "--samples", "2"], "admitted"),
    (["classify", "--metric", "builtin:w0", "--tolerance", "1e-3"], "reject margin"),
    (["components", "--metric", "builtin:w0", "--point", "1,2,3"], "--point"),
])
def test_input_errors(capsys, argv, match):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith("error: ") and match in err


def test_verify_all_builtins(capsys):
    code, out, _ = run(capsys, "verify")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert [m["metric"]["name"] for m in doc["metrics"]] == ["w0", "w3bar", "w6bar", "w1", "w2"]


def test_verify_w0_f(capsys):
    code, out, _ = run(capsys, "verify", "--metric", "builtin:w0")
    doc = json.loads(out)
    assert code == 0
    assert doc["metrics"][0]["checks"]["f_vs_oracle"]["max_deviation"] < 1e-10


def test_verify_detects_corrupted_f_family(capsys, monkeypatch):
    pos, neg, div, comb = fundamental.F_FAMILIES[5]
    corrupted = list(fundamental.F_FAMILIES)
    corrupted[5] = (pos, neg, div, comb.replace("-B2", "+B2"))
    monkeypatch.setattr(fundamental, "F_FAMILIES", corrupted)
    code, out, _ = run(capsys, "verify", "--metric", "builtin:w6bar")
    doc = json.loads(out)
    assert code == 3 and not doc["passed"]
    assert not doc["metrics"][0]["checks"]["f_vs_oracle"]["passed"]


def test_verify_detects_corrupted_christoffel_family(capsys, monkeypatch):
    original = connection._Closed.ij_k
    monkeypatch.setattr(connection._Closed, "ij_k",
                        lambda self, i, j, k, s: original(self, i, j, k, s) + self.A(i))
    code, out, _ = run(capsys, "verify", "--metric", "builtin:w3bar")
    doc = json.loads(out)
    assert code == 3
    assert not doc["metrics"][0]["checks"]["christoffel_vs_generic"]["passed"]


def test_components_w0(capsys):
    code, out, _ = run(capsys, "components", "--metric", "builtin:w0", "--point", "2,3,4,5")
    doc = json.loads(out)
    assert code == 0
    assert doc["inverse_data"]["D"] == 73728.0
    assert doc["g"][0] == [54.0, 14.0, 46.0, 14.0]
    assert doc["g_tilde"][0] == [46.0, 14.0, 54.0, 14.0]
    assert max(abs(v) for plane in doc["F"] for row in plane for v in row) < 1e-12
    assert doc["jets"]["A"] == {"value": 54.0, "partials": [4.0, 6.0, 8.0, 10.0]}


def test_components_degenerate_point(capsys):
    code, _, err = run(capsys, "components", "--metric", "builtin:w0", "--point", "2,2,2,2")
    assert code == 1 and "A > C violated" in err


def test_components_w6bar(capsys):
    code, out, _ = run(capsys, "components", "--metric", "builtin:w6bar", "--point", "1,1,1,1")
    doc = json.loads(out)
    assert code == 0
    assert doc["F"][0][0][0] == pytest.approx(1.0)
    assert doc["theta_tilde"] == pytest.approx(doc["theta"])


def test_components_w2_value(capsys):
    code, out, _ = run(capsys, "components", "--metric", "builtin:w2", "--point", "0.5,0,0,0")
    assert code == 0
    assert json.loads(out)["F"][1][1][1] == pytest.approx(-2 * math.sinh(0.5))


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "circulant_manifold", "classify",
                           "--metric", "builtin:w3bar", "--samples", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["most_specific"] == "W3bar"
