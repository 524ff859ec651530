"""Structural fingerprint of an (original, optimized) circuit pair."""
from __future__ import annotations

import numpy as np

from .circuit import HISTOGRAM_KINDS, Circuit, depth, gate_counts

_GLOBAL = ("depth", "total", "width", "qubits", "size")
_AGG = ("sum_1q", "sum_2q", "ratio_1q", "ratio_2q")
SIDE_NAMES = _GLOBAL + tuple(f"n_{k.value}" for k in HISTOGRAM_KINDS) + _AGG
SIDE_LENGTH = len(SIDE_NAMES)  # 23
FEATURE_NAMES = tuple(f"orig_{n}" for n in SIDE_NAMES) + tuple(f"opt_{n}" for n in SIDE_NAMES)
NUM_FEATURES = len(FEATURE_NAMES)  # 46


def side_features(c: Circuit) -> list[float]:
    counts = gate_counts(c)
    total = counts.total
    # no classical registers or non-gate instructions exist in this IR, so
    # width == qubit count and size == gate count
    out = [depth(c), total, c.num_qubits, c.num_qubits, total]
    out += [counts[k] for k in HISTOGRAM_KINDS]
    out += [counts.one_qubit, counts.two_qubit,
            counts.one_qubit / total if total else 0.0,
            counts.two_qubit / total if total else 0.0]
    return [float(v) for v in out]


def extract_features(original: Circuit, optimized: Circuit) -> np.ndarray:
    return np.array(side_features(original) + side_features(optimized), dtype=float)
