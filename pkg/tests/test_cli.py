import json

import pytest

from passprint.cli import main
from passprint.passes import PASS_FUNCTIONS, PassId

HH = "OPENQASM 2.0;\nqreg q[2];\nh q[0];\nh q[0];\ncx q[0],q[1];\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["gen", "--samples", "100", "--seed", "7", "--qmax", "6", "--depth", "15",
                 "--out", str(d / "d.jsonl")]) == 0
    assert main(["train", "--data", str(d / "d.jsonl"), "--model", "knn",
                 "--out", str(d / "m.json")]) == 0
    (d / "hh.qasm").write_text(HH)
    return d


def test_gen_file_and_manifest(workspace, capsys):
    lines = (workspace / "d.jsonl").read_text().splitlines()
    assert len(lines) == 100
    man = json.loads((workspace / "d.jsonl.manifest.json").read_text())
    assert man["command"] == "gen" and man["config"]["samples"] == 100
    assert man["seeds"] == {"dataset": 7} and "sha256" in man["outputs"]["dataset"]
    code, _, _ = run(capsys, "gen", "--samples", "100", "--seed", "7", "--qmax", "6",
                     "--depth", "15", "--out", str(workspace / "d2.jsonl"))
    assert code == 0
    assert (workspace / "d2.jsonl").read_bytes() == (workspace / "d.jsonl").read_bytes()


def test_eval_json_schema(workspace, capsys):
    code, out, _ = run(capsys, "eval", "--data", str(workspace / "d.jsonl"),
                       "--model", str(workspace / "m.json"), "--json")
    assert code == 0
    rep = json.loads(out)
    assert len(rep["labels"]) == 7
    assert set(rep) == {"labels", "hamming", "avg_f1", "micro_f1"}
    _, again, _ = run(capsys, "eval", "--data", str(workspace / "d.jsonl"),
                      "--model", str(workspace / "m.json"), "--json")
    assert again == out


def test_optimize_and_predict(workspace, capsys):
    out_path = workspace / "o.qasm"
    code, _, _ = run(capsys, "optimize", "--in", str(workspace / "hh.qasm"), "--passes", "inverse",
                     "--out", str(out_path))
    assert code == 0 and "h q" not in out_path.read_text()
    code, out, _ = run(capsys, "predict", "--original", str(workspace / "hh.qasm"),
                       "--optimized", str(out_path), "--model", str(workspace / "m.json"), "--json")
    assert code == 0
    rep = json.loads(out)
    assert len(rep["baseline"]) == 6 and rep["miscellaneous"]["pass"] == "Miscellaneous"
    assert all(0 <= r["probability"] <= 1 for r in rep["baseline"])
    code, _, _ = run(capsys, "predict", "--original", str(workspace / "hh.qasm"),
                     "--optimized", str(workspace / "hh.qasm"), "--model", str(workspace / "m.json"))
    assert code == 0


def test_empty_body_after_inverse(tmp_path, capsys):
    src = tmp_path / "a.qasm"
    src.write_text("OPENQASM 2.0;\nqreg q[1];\nh q[0];\nh q[0];\n")
    code, _, _ = run(capsys, "optimize", "--in", str(src), "--passes", "inverse",
                     "--out", str(tmp_path / "b.qasm"))
    assert code == 0
    assert (tmp_path / "b.qasm").read_text().strip().endswith("qreg q[1];")


def test_error_exit_codes(workspace, tmp_path, capsys):
    code, _, err = run(capsys, "optimize", "--in", str(workspace / "hh.qasm"), "--passes", "bogus",
                       "--out", str(tmp_path / "x.qasm"))
    assert code == 1 and "opt1q" in err
    three = tmp_path / "three.qasm"
    three.write_text("OPENQASM 2.0;\nqreg q[3];\n")
    code, _, err = run(capsys, "predict", "--original", str(workspace / "hh.qasm"),
                       "--optimized", str(three), "--model", str(workspace / "m.json"))
    assert code == 2 and "mismatch" in err
    code, _, _ = run(capsys, "train", "--data", str(tmp_path / "missing"), "--model", "knn",
                     "--out", str(tmp_path / "m"))
    assert code == 2
    code, _, _ = run(capsys, "train", "--data", str(workspace / "d.jsonl"))
    assert code == 1
    bad = tmp_path / "bad.qasm"
    bad.write_text("OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n")
    code, _, err = run(capsys, "optimize", "--in", str(bad), "--passes", "inverse",
                       "--out", str(tmp_path / "y.qasm"))
    assert code == 2 and "unknown gate" in err


def test_verify_reports_and_fails_on_corruption(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "--trials", "5", "--qubits", "4", "--json")
    rep = json.loads(out)
    assert code == 0 and len(rep["passes"]) == 8
    assert all("max_deviation" in p for p in rep["passes"])

    def broken(c):
        return c.with_gates(c.gates[1:])

    monkeypatch.setitem(PASS_FUNCTIONS, PassId.INVERSE_CANCELLATION, broken)
    code, _, _ = run(capsys, "verify", "--pass", "inverse", "--trials", "3", "--qubits", "4-5")
    assert code == 3


def test_reproduce_small(tmp_path, capsys):
    code, out, _ = run(capsys, "reproduce", "--samples", "120", "--qmax", "5", "--depth", "10",
                       "--models", "knn,logreg", "--out-dir", str(tmp_path / "r"), "--json")
    assert code == 0
    man = json.loads((tmp_path / "r" / "manifest.json").read_text())
    assert set(man["reference_comparison"]["aggregate"]) == {"knn", "logreg"}
    assert (tmp_path / "r" / "aggregate.tsv").exists()
    assert (tmp_path / "r" / "aggregate.png").exists()
