"""Multi-label evaluation metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _ratio(num, den):
    return float(num) / float(den) if den else 0.0


def hamming_score(y_true, y_pred) -> float:
    """Mean per-sample Jaccard index |T & P| / |T | P| (1.0 when both are empty)."""
    t = np.asarray(y_true, dtype=bool)
    p = np.asarray(y_pred, dtype=bool)
    inter = (t & p).sum(axis=1)
    union = (t | p).sum(axis=1)
    scores = np.where(union == 0, 1.0, inter / np.maximum(union, 1))
    return float(scores.mean())


@dataclass(frozen=True)
class EvalReport:
    labels: tuple
    precision: tuple
    recall: tuple
    f1: tuple
    support: tuple
    hamming: float
    avg_f1: float
    micro_f1: float

    def to_dict(self) -> dict:
        rows = [{"label": l, "precision": p, "recall": r, "f1": f, "support": s}
                for l, p, r, f, s in zip(self.labels, self.precision, self.recall,
                                         self.f1, self.support)]
        return {"labels": rows, "hamming": self.hamming, "avg_f1": self.avg_f1,
                "micro_f1": self.micro_f1}

    @classmethod
    def from_dict(cls, d) -> EvalReport:
        rows = d["labels"]
        return cls(tuple(r["label"] for r in rows), tuple(r["precision"] for r in rows),
                   tuple(r["recall"] for r in rows), tuple(r["f1"] for r in rows),
                   tuple(r["support"] for r in rows), d["hamming"], d["avg_f1"], d["micro_f1"])

    def f1_of(self, label: str) -> float:
        return self.f1[self.labels.index(label)]


def evaluate_predictions(y_true, y_pred, labels) -> EvalReport:
    t = np.asarray(y_true, dtype=bool)
    p = np.asarray(y_pred, dtype=bool)
    if t.shape != p.shape:
        raise ValueError(f"shape mismatch {t.shape} vs {p.shape}")
    tp = (t & p).sum(axis=0)
    fp = (~t & p).sum(axis=0)
    fn = (t & ~p).sum(axis=0)
    prec = [_ratio(a, a + b) for a, b in zip(tp, fp)]
    rec = [_ratio(a, a + b) for a, b in zip(tp, fn)]
    f1 = [_ratio(2 * a, 2 * a + b + c) for a, b, c in zip(tp, fp, fn)]
    TP, FP, FN = tp.sum(), fp.sum(), fn.sum()
    return EvalReport(
        labels=tuple(labels),
        precision=tuple(prec),
        recall=tuple(rec),
        f1=tuple(f1),
        support=tuple(int(v) for v in t.sum(axis=0)),
        hamming=hamming_score(t, p),
        avg_f1=float(np.mean(f1)),
        micro_f1=_ratio(2 * TP, 2 * TP + FP + FN),
    )


__all__ = ["EvalReport", "evaluate_predictions", "hamming_score"]
