from passprint.ml.metrics import evaluate_predictions
from passprint.ml.models import ModelKind
from passprint.dataset import LABEL_NAMES
from passprint.report import (REFERENCE_AGGREGATE, REFERENCE_PER_LABEL, reference_deltas,
                              to_tsv, write_report_bundle, PER_LABEL_HEADER, per_label_rows)

import numpy as np


def _report(seed):
    rng = np.random.default_rng(seed)
    t = rng.integers(0, 2, (40, 7))
    p = rng.integers(0, 2, (40, 7))
    return evaluate_predictions(t, p, LABEL_NAMES)


def test_reference_tables_cover_labels_and_models():
    assert set(REFERENCE_PER_LABEL) == set(LABEL_NAMES)
    assert set(REFERENCE_AGGREGATE) == set(ModelKind)
    assert REFERENCE_PER_LABEL["TemplateOptimization"][2] == 0.96
    assert REFERENCE_AGGREGATE[ModelKind.NEURAL_NETWORK][0] == 0.682


def test_per_label_tsv_shape():
    text = to_tsv(PER_LABEL_HEADER, per_label_rows(_report(0)))
    rows = [line.split("\t") for line in text.strip().split("\n")]
    assert len(rows) == 8 and all(len(r) == len(PER_LABEL_HEADER) for r in rows)


def test_deltas():
    reports = {k: _report(i) for i, k in enumerate(ModelKind)}
    d = reference_deltas(reports)
    rf = reports[ModelKind.RANDOM_FOREST]
    row = d["per_label"]["Miscellaneous"]
    assert row["delta"]["f1"] == rf.f1[6] - 0.10
    assert set(d["aggregate"]) == {k.value for k in ModelKind}


def test_bundle_is_reproducible(tmp_path):
    reports = {k: _report(i) for i, k in enumerate(ModelKind)}
    Y = np.random.default_rng(0).integers(0, 2, (30, 7))
    a = write_report_bundle(tmp_path / "a", reports, Y)
    b = write_report_bundle(tmp_path / "b", reports, Y)
    assert set(a) == set(b)
    for name in a:
        assert a[name].read_bytes() == b[name].read_bytes(), name
    assert a["aggregate_figure"].read_bytes()[:4] == b"\x89PNG"
