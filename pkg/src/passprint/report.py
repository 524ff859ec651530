"""Per-label and aggregate result tables, reference comparisons and figures."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import LABEL_NAMES
from .ml.metrics import EvalReport
from .ml.models import ModelKind

# Published reference numbers: random forest per-label (precision, recall, F1).
REFERENCE_PER_LABEL = {
    "Optimize1qGates": (0.80, 0.75, 0.77),
    "InverseCancellation": (0.55, 0.46, 0.49),
    "CommutativeCancellation": (0.50, 0.49, 0.49),
    "RemoveIdentityEquivalent": (0.51, 0.50, 0.51),
    "ConsolidateBlocks": (0.49, 0.48, 0.49),
    "TemplateOptimization": (0.99, 0.93, 0.96),
    "Miscellaneous": (0.25, 0.07, 0.10),
}

# Published reference numbers: (Hamming score, average F1, micro F1) per model.
REFERENCE_AGGREGATE = {
    ModelKind.NEURAL_NETWORK: (0.682, 0.594, 0.624),
    ModelKind.LOGISTIC_REGRESSION: (0.662, 0.573, 0.609),
    ModelKind.GRADIENT_BOOSTING: (0.660, 0.561, 0.601),
    ModelKind.RANDOM_FOREST: (0.647, 0.556, 0.592),
    ModelKind.KNN: (0.616, 0.528, 0.568),
}

PER_LABEL_HEADER = ("label", "precision", "recall", "f1", "support",
                    "ref_precision", "ref_recall", "ref_f1", "delta_f1")
AGGREGATE_HEADER = ("model", "hamming", "avg_f1", "micro_f1",
                    "ref_hamming", "ref_avg_f1", "ref_micro_f1", "delta_hamming")


def _f(x) -> str:
    return f"{x:.4f}"


def per_label_rows(report: EvalReport, with_reference=True) -> list[tuple]:
    rows = []
    for i, label in enumerate(report.labels):
        row = (label, _f(report.precision[i]), _f(report.recall[i]), _f(report.f1[i]),
               str(report.support[i]))
        if with_reference:
            ref = REFERENCE_PER_LABEL.get(label)
            row += tuple(_f(v) for v in ref) + (_f(report.f1[i] - ref[2]),) if ref else ("",) * 4
        rows.append(row)
    return rows


def aggregate_rows(reports: dict) -> list[tuple]:
    rows = []
    for kind, rep in reports.items():
        kind = ModelKind(kind)
        ref = REFERENCE_AGGREGATE[kind]
        rows.append((kind.value, _f(rep.hamming), _f(rep.avg_f1), _f(rep.micro_f1),
                     *(_f(v) for v in ref), _f(rep.hamming - ref[0])))
    return rows


def to_tsv(header, rows) -> str:
    return "\n".join("\t".join(map(str, r)) for r in [header, *rows]) + "\n"


def format_table(header, rows) -> str:
    """Fixed-width text table for terminals."""
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def reference_deltas(reports: dict) -> dict:
    """Signed differences from the reference numbers, keyed for the run manifest."""
    out = {"per_label": {}, "aggregate": {}}
    rf = reports.get(ModelKind.RANDOM_FOREST)
    if rf is not None:
        for i, label in enumerate(rf.labels):
            p, r, f = REFERENCE_PER_LABEL[label]
            out["per_label"][label] = {
                "precision": rf.precision[i], "recall": rf.recall[i], "f1": rf.f1[i],
                "ref": {"precision": p, "recall": r, "f1": f},
                "delta": {"precision": rf.precision[i] - p, "recall": rf.recall[i] - r,
                          "f1": rf.f1[i] - f},
            }
    for kind, rep in reports.items():
        h, a, m = REFERENCE_AGGREGATE[ModelKind(kind)]
        out["aggregate"][ModelKind(kind).value] = {
            "hamming": rep.hamming, "avg_f1": rep.avg_f1, "micro_f1": rep.micro_f1,
            "ref": {"hamming": h, "avg_f1": a, "micro_f1": m},
            "delta": {"hamming": rep.hamming - h, "avg_f1": rep.avg_f1 - a,
                      "micro_f1": rep.micro_f1 - m},
        }
    return out


# --- figures -------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path):
    # fixed metadata keeps reruns byte-identical
    fig.savefig(path, dpi=100, metadata={"Software": None})


def plot_per_label_f1(report: EvalReport, path) -> None:
    plt = _pyplot()
    x = np.arange(len(report.labels))
    ref = [REFERENCE_PER_LABEL[l][2] for l in report.labels]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(x - 0.2, report.f1, 0.4, label="measured")
    ax.bar(x + 0.2, ref, 0.4, label="reference")
    ax.set_xticks(x, [l.replace("Cancellation", "Canc.") for l in report.labels],
                  rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("F1")
    ax.set_title("Random forest per-label F1")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_aggregate(reports: dict, path) -> None:
    plt = _pyplot()
    kinds = [ModelKind(k) for k in reports]
    x = np.arange(len(kinds))
    fig, ax = plt.subplots(figsize=(8, 4))
    for j, (name, attr) in enumerate([("Hamming", "hamming"), ("avg F1", "avg_f1"),
                                      ("micro F1", "micro_f1")]):
        vals = [getattr(reports[k], attr) for k in reports]
        refs = [REFERENCE_AGGREGATE[k][j] for k in kinds]
        ax.bar(x + (j - 1) * 0.27, vals, 0.27, label=name)
        ax.scatter(x + (j - 1) * 0.27, refs, marker="_", s=200, color="black",
                   zorder=3, label="reference" if j == 0 else None)
    ax.set_xticks(x, [k.value for k in kinds])
    ax.set_ylim(0, 1.05)
    ax.set_title("Aggregate scores by model")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_label_prevalence(Y, path) -> None:
    plt = _pyplot()
    Y = np.asarray(Y)
    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.bar(np.arange(Y.shape[1]), Y.mean(axis=0))
    ax.set_xticks(np.arange(Y.shape[1]), LABEL_NAMES[:Y.shape[1]], rotation=30, ha="right",
                  fontsize=8)
    ax.set_ylabel("fraction of samples")
    ax.set_title("Label prevalence")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def write_report_bundle(out_dir, reports: dict, Y_all=None) -> dict:
    """TSV tables and PNG figures; returns {artifact name: path}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    rf = reports.get(ModelKind.RANDOM_FOREST)
    if rf is not None:
        p = out / "per_label.tsv"
        p.write_text(to_tsv(PER_LABEL_HEADER, per_label_rows(rf)), encoding="utf-8")
        files["per_label"] = p
        p = out / "per_label_f1.png"
        plot_per_label_f1(rf, p)
        files["per_label_figure"] = p
    for kind, rep in reports.items():
        p = out / f"per_label_{ModelKind(kind).value}.tsv"
        p.write_text(to_tsv(PER_LABEL_HEADER, per_label_rows(rep)), encoding="utf-8")
        files[f"per_label_{ModelKind(kind).value}"] = p
    p = out / "aggregate.tsv"
    p.write_text(to_tsv(AGGREGATE_HEADER, aggregate_rows(reports)), encoding="utf-8")
    files["aggregate"] = p
    p = out / "aggregate.png"
    plot_aggregate(reports, p)
    files["aggregate_figure"] = p
    if Y_all is not None:
        p = out / "label_prevalence.png"
        plot_label_prevalence(Y_all, p)
        files["prevalence_figure"] = p
    return files
