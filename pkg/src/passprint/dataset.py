"""Labeled pair dataset: builder, JSON-lines persistence and CSV export."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .features import FEATURE_NAMES, NUM_FEATURES, extract_features
from .passes import BASELINE, MISC, PassId, PassSelection, apply_passes
from .randgen import GenSpec, make_rng, random_circuit

SCHEMA_VERSION = 1
LABEL_NAMES = tuple(p.title for p in BASELINE) + ("Miscellaneous",)
NUM_LABELS = len(LABEL_NAMES)  # 7


class DatasetError(ValueError):
    """Malformed or incompatible dataset file."""

    def __init__(self, message, line=None, kind="schema"):
        self.line = line
        self.kind = kind
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class BuilderConfig:
    samples: int = 10000
    q_min: int = 4
    q_max: int = 12
    depth: int = 50
    misc_prob: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if not 2 <= self.q_min <= self.q_max:
            raise ValueError("need 2 <= q_min <= q_max")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if not 0 <= self.misc_prob <= 1:
            raise ValueError("misc_prob must lie in [0, 1]")


@dataclass
class Dataset:
    X: np.ndarray
    Y: np.ndarray
    meta: list = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float).reshape(-1, NUM_FEATURES)
        self.Y = np.asarray(self.Y, dtype=np.int8).reshape(-1, NUM_LABELS)
        if len(self.X) != len(self.Y):
            raise DatasetError(f"{len(self.X)} feature rows but {len(self.Y)} label rows")
        if not self.meta:
            self.meta = [{} for _ in range(len(self.X))]

    def __len__(self):
        return len(self.X)

    def subset(self, idx) -> Dataset:
        idx = np.asarray(idx, dtype=int)
        return Dataset(self.X[idx], self.Y[idx], [self.meta[i] for i in idx])


def label_vector(sel: PassSelection) -> list[int]:
    return [int(p in sel.baseline) for p in BASELINE] + [int(bool(sel.misc))]


def draw_selection(rng: np.random.Generator, misc_prob: float) -> PassSelection:
    # uniform non-empty subset of the baseline: a mask in [1, 2^6)
    mask = int(rng.integers(1, 2 ** len(BASELINE)))
    baseline = {p for k, p in enumerate(BASELINE) if mask >> k & 1}
    misc = set()
    if rng.random() < misc_prob:
        # possibly empty subset of the miscellaneous passes
        mmask = int(rng.integers(0, 2 ** len(MISC)))
        misc = {p for k, p in enumerate(MISC) if mmask >> k & 1}
    return PassSelection(baseline, misc)


def build_sample(cfg: BuilderConfig, index: int):
    """Features, labels and metadata of sample ``index``; a pure function of (cfg, index)."""
    rng = make_rng(cfg.seed, index)
    nq = int(rng.integers(cfg.q_min, cfg.q_max + 1))
    circuit_seed = int(rng.integers(0, 2 ** 63))
    sel = draw_selection(rng, cfg.misc_prob)
    original = random_circuit(GenSpec(nq, cfg.depth, circuit_seed))
    optimized = apply_passes(original, sel)
    meta = {"index": index, "seed": circuit_seed, "qubits": nq,
            "passes": [p.cli_name for p in sel.ordered]}
    return extract_features(original, optimized), label_vector(sel), meta


def _build_chunk(args):
    cfg, lo, hi = args
    return [build_sample(cfg, i) for i in range(lo, hi)]


def build_dataset(cfg: BuilderConfig, jobs: int = 1, progress=None) -> Dataset:
    """Synthetic pair dataset; identical output for any ``jobs``."""
    chunk = 250
    tasks = [(cfg, lo, min(lo + chunk, cfg.samples)) for lo in range(0, cfg.samples, chunk)]
    rows = []
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            for part in pool.map(_build_chunk, tasks):
                rows.extend(part)
                if progress:
                    progress(len(rows), cfg.samples)
    else:
        for task in tasks:
            rows.extend(_build_chunk(task))
            if progress:
                progress(len(rows), cfg.samples)
    X = np.array([r[0] for r in rows])
    Y = np.array([r[1] for r in rows])
    return Dataset(X, Y, [r[2] for r in rows])


# --- persistence ---------------------------------------------------------

def _number(v):
    f = float(v)
    return int(f) if f.is_integer() and abs(f) < 2 ** 53 else f


def dumps_record(x, y, meta) -> str:
    return json.dumps({"version": SCHEMA_VERSION, "x": [_number(v) for v in x],
                       "y": [int(v) for v in y], "meta": meta}, separators=(",", ":"))


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, meta in zip(ds.X, ds.Y, ds.meta):
            fh.write(dumps_record(x, y, meta) + "\n")


def load_dataset(path) -> Dataset:
    X, Y, meta = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"unparseable record ({exc.msg})", lineno, "parse") from None
            if not isinstance(rec, dict):
                raise DatasetError("record is not an object", lineno)
            if rec.get("version") != SCHEMA_VERSION:
                raise DatasetError(f"schema version {rec.get('version')!r}, "
                                   f"expected {SCHEMA_VERSION}", lineno, "version")
            x, y = rec.get("x"), rec.get("y")
            if not isinstance(x, list) or len(x) != NUM_FEATURES:
                raise DatasetError(f"feature vector must have {NUM_FEATURES} entries", lineno)
            if not isinstance(y, list) or len(y) != NUM_LABELS or any(v not in (0, 1) for v in y):
                raise DatasetError(f"label vector must have {NUM_LABELS} zero/one entries", lineno)
            X.append(x)
            Y.append(y)
            meta.append(rec.get("meta", {}))
    if not X:
        raise DatasetError("dataset is empty", kind="parse")
    return Dataset(np.array(X, dtype=float), np.array(Y), meta)


def export_csv(ds: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(FEATURE_NAMES) + list(LABEL_NAMES))
        for x, y in zip(ds.X, ds.Y):
            w.writerow([_number(v) for v in x] + [int(v) for v in y])


def pass_ids(names) -> list[PassId]:
    return [PassId.parse(n) for n in names]


__all__ = ["BuilderConfig", "Dataset", "DatasetError", "LABEL_NAMES", "NUM_LABELS",
           "build_dataset", "build_sample", "save_dataset", "load_dataset", "export_csv",
           "label_vector", "draw_selection"]
