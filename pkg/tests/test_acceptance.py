"""
Acceptance suite.  Every criterion prints one ``PASS``/``FAIL`` line; the
full-scale pipeline criteria take a few minutes on one core.

Run on its own with ``python3 tests/test_acceptance.py`` or
``pytest -s tests/test_acceptance.py``.
"""
import random
import time

import numpy as np
import pytest

from passprint.circuit import NAMED_KINDS, depth, gate_counts
from passprint.cli import run_reproduce
from passprint.dataset import LABEL_NAMES, BuilderConfig
from passprint.ml import nn
from passprint.ml.metrics import evaluate_predictions, hamming_score
from passprint.ml.models import ModelKind
from passprint.passes import (ALL_PASSES, PASS_FUNCTIONS, PassId, commutative_cancellation,
                              consolidate_blocks, inverse_cancellation, optimize_1q_gates)
from passprint.qasm import QasmError, emit_qasm, parse_qasm, tokenize
from passprint.randgen import GenSpec, random_circuit
from passprint.sim import unitary_deviation
from passprint.verify import tolerance_for, trial_circuits

SOUND_TOL = 1e-9
CLIFFORD_TOL = 1e-6
GRAD_REL_TOL = 1e-4
HAMMING_FLOOR = 0.5
RUNTIME_LIMIT_S = 30 * 60

PAPER_SCALE = BuilderConfig(samples=10000, q_min=4, q_max=12, depth=50, misc_prob=0.25, seed=0)
SPLIT = 0.8


def report(capsys, criterion, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")


@pytest.fixture(scope="module")
def trials():
    return list(trial_circuits(200, 4, 6, 20, seed=2024))


def named_total(c):
    counts = gate_counts(c)
    return sum(counts[k] for k in NAMED_KINDS)


# 1 ----------------------------------------------------------------------

def test_criterion_1_pass_soundness(trials, capsys):
    assert tolerance_for(PassId.OPTIMIZE_CLIFFORDS) == CLIFFORD_TOL
    worst, failures = {}, {}
    for pid in ALL_PASSES:
        tol = CLIFFORD_TOL if pid is PassId.OPTIMIZE_CLIFFORDS else SOUND_TOL
        devs = [unitary_deviation(c, PASS_FUNCTIONS[pid](c)) for c in trials]
        worst[pid.cli_name] = max(devs)
        failures[pid.cli_name] = sum(not d < tol for d in devs)
    ok = not any(failures.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(capsys, 1, ok, f"200 circuits x 8 passes, max deviation: {detail}")
    assert ok, failures


# 2 ----------------------------------------------------------------------

def test_criterion_2_structural_fingerprints(trials, capsys):
    problems = []
    for c in trials:
        for fn in (inverse_cancellation, PASS_FUNCTIONS[PassId.TEMPLATE_OPTIMIZATION]):
            out = fn(c)
            if depth(out) > depth(c) or len(out) > len(c):
                problems.append(fn.__name__)
    # raw random circuits rarely contain a consolidatable block, so the
    # consolidate/split checks also run on circuits that earlier passes
    # have already compacted
    prepared = [commutative_cancellation(inverse_cancellation(optimize_1q_gates(c))) for c in trials]
    cons_fired = split_fired = 0
    for c in trials + prepared:
        out = consolidate_blocks(c)
        if out.gates != c.gates:
            cons_fired += 1
            if not named_total(out) < named_total(c):
                problems.append("consolidate")
        for src in (c, out):
            split = PASS_FUNCTIONS[PassId.SPLIT_2Q_UNITARIES](src)
            split_fired += split.gates != src.gates
            if gate_counts(split).two_qubit > gate_counts(src).two_qubit:
                problems.append("split2q")
    ok = not problems and cons_fired > 0 and split_fired > 0
    report(capsys, 2, ok, f"violations {len(problems)}; consolidate fired {cons_fired}x, "
                          f"split2q fired {split_fired}x")
    assert ok, problems


# 3 ----------------------------------------------------------------------

Y_TRUE = np.array([[1, 0, 0, 0, 0, 0, 0], [1, 1, 0, 0, 0, 0, 1],
                   [0, 1, 1, 0, 0, 0, 0], [1, 0, 1, 1, 0, 0, 0]])
Y_PRED = np.array([[1, 0, 0, 0, 0, 0, 0], [1, 0, 0, 0, 1, 0, 1],
                   [0, 1, 0, 0, 0, 0, 0], [0, 0, 1, 1, 0, 1, 0]])


def test_criterion_3_metrics(capsys):
    r = evaluate_predictions(Y_TRUE, Y_PRED, LABEL_NAMES)
    checks = [
        r.precision == (1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0),
        r.recall == (2 / 3, 0.5, 0.5, 1.0, 0.0, 0.0, 1.0),
        r.f1 == (4 / 5, 2 / 3, 2 / 3, 1.0, 0.0, 0.0, 1.0),
        r.hamming == 0.625,
        r.micro_f1 == 12 / 17,
        hamming_score(Y_TRUE, Y_TRUE) == 1.0,
        hamming_score([[1, 1]], [[1, 0]]) == 0.5,
    ]
    ok = all(checks)
    report(capsys, 3, ok, f"{sum(checks)}/{len(checks)} hand-computed values reproduced")
    assert ok


# 4 ----------------------------------------------------------------------

def test_criterion_4_gradient_check(capsys):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(10, 46))
    Y = rng.integers(0, 2, (10, 7)).astype(float)
    params = nn.init_params([46, 128, 64, 7], rng)
    _, analytic = nn.loss_and_grads(params, X, Y)
    numeric = nn.numerical_grads(params, X, Y)
    worst = max(float((np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-12)).max())
                for a, n in zip(analytic, numeric))
    ok = worst < GRAD_REL_TOL
    report(capsys, 4, ok, f"max relative error {worst:.2e} (limit {GRAD_REL_TOL:.0e})")
    assert ok


# 5 and 6 --------------------------------------------------------------------

@pytest.fixture(scope="module")
def paper_runs(tmp_path_factory):
    runs = []
    for name in ("first", "second"):
        t0 = time.perf_counter()
        res = run_reproduce(PAPER_SCALE, tmp_path_factory.mktemp(name), split=SPLIT)
        res["wall"] = time.perf_counter() - t0
        runs.append(res)
    return runs


def _rf_f1(run):
    rep = run["reports"][ModelKind.RANDOM_FOREST]
    return dict(zip(rep.labels, rep.f1))


def test_criterion_5a_top_two_labels(paper_runs, capsys):
    f1 = _rf_f1(paper_runs[0])
    baseline = sorted(LABEL_NAMES[:6], key=lambda l: -f1[l])
    ok = set(baseline[:2]) == {"TemplateOptimization", "Optimize1qGates"}
    ranking = ", ".join(f"{l} {f1[l]:.3f}" for l in baseline)
    report(capsys, "5a", ok, f"random forest baseline F1 ranking: {ranking}")
    assert ok


def test_criterion_5b_misc_is_minimum(paper_runs, capsys):
    f1 = _rf_f1(paper_runs[0])
    ok = f1["Miscellaneous"] == min(f1.values())
    report(capsys, "5b", ok, f"Miscellaneous F1 {f1['Miscellaneous']:.3f}, "
                             f"next lowest {sorted(f1.values())[1]:.3f}")
    assert ok


def test_criterion_5c_hamming_floor(paper_runs, capsys):
    scores = {k.value: r.hamming for k, r in paper_runs[0]["reports"].items()}
    best = max(scores, key=scores.get)
    ok = scores[best] >= HAMMING_FLOOR
    detail = ", ".join(f"{k} {v:.3f}" for k, v in scores.items())
    report(capsys, "5c", ok, f"best {best} {scores[best]:.3f}; all: {detail}")
    assert ok


def test_criterion_5d_manifest_tables(paper_runs, capsys):
    import json
    man = json.loads(paper_runs[0]["manifest"].read_text())
    comp = man["reference_comparison"]
    ok = (set(comp["per_label"]) == set(LABEL_NAMES)
          and set(comp["aggregate"]) == {k.value for k in ModelKind}
          and all("delta" in v for v in comp["per_label"].values())
          and all("delta" in v for v in comp["aggregate"].values())
          and {"per_label", "aggregate"} <= set(man["outputs"]))
    wall = paper_runs[0]["wall"]
    report(capsys, "5d", ok, f"manifest holds 7 per-label and 5 aggregate rows with deltas; "
                             f"run took {wall:.0f} s")
    assert ok


def test_criterion_5_runtime(paper_runs, capsys):
    wall = paper_runs[0]["wall"]
    ok = wall < RUNTIME_LIMIT_S
    report(capsys, "5 runtime", ok, f"{wall:.0f} s for the full pipeline (limit {RUNTIME_LIMIT_S} s)")
    assert ok


def test_criterion_5_nn_loss_smoke(paper_runs, capsys):
    h = paper_runs[0]["models"][ModelKind.NEURAL_NETWORK].params["loss_history"][:5]
    ok = all(b <= a + 1e-6 for a, b in zip(h, h[1:]))
    report(capsys, "5 nn loss", ok, "first five epoch losses " + ", ".join(f"{v:.4f}" for v in h))
    assert ok


def test_criterion_6_determinism(paper_runs, capsys):
    a, b = (r["outputs"] for r in paper_runs)
    differing = [name for name in a if a[name].read_bytes() != b[name].read_bytes()]
    ok = not differing and set(a) == set(b)
    report(capsys, 6, ok, f"{len(a)} artifacts compared byte for byte (dataset, tables, figures, "
                          f"reports); differing: {differing or 'none'}")
    assert ok


# 7 ----------------------------------------------------------------------

def test_criterion_7_parser_robustness(capsys):
    mismatches = 0
    for i in range(1000):
        c = random_circuit(GenSpec(2 + i % 9, 1 + i % 30, seed=10_000 + i))
        mismatches += parse_qasm(emit_qasm(c)) != c
    rng = random.Random(11)
    base = emit_qasm(random_circuit(GenSpec(4, 8, seed=3)))
    toks = [t.text for t in tokenize(base) if t.kind != "eof"]
    junk = ["@", "]]", "qq", "-", "*", "1.5.2", "(", "q[99]", "OPENQASM", "\"x\"", "->"]
    structured = crashes = accepted = 0
    for _ in range(3000):
        t = list(toks)
        for _ in range(rng.randint(1, 3)):
            j = rng.randrange(len(t))
            op = rng.random()
            if op < 0.4:
                del t[j]
            elif op < 0.8:
                t[j] = rng.choice(toks + junk)
            else:
                t.insert(j, rng.choice(toks + junk))
        try:
            parse_qasm(" ".join(t))
            accepted += 1
        except QasmError:
            structured += 1
        except Exception:  # noqa: BLE001 - any other exception is the failure being measured
            crashes += 1
    for _ in range(1000):
        text = "".join(chr(rng.randrange(32, 127)) for _ in range(rng.randrange(60)))
        try:
            parse_qasm(text)
        except QasmError:
            structured += 1
        except Exception:  # noqa: BLE001
            crashes += 1
    ok = mismatches == 0 and crashes == 0
    report(capsys, 7, ok, f"round-trip mismatches {mismatches}/1000; fuzz: {structured} structured "
                          f"errors, {accepted} still-valid mutants, {crashes} crashes")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
