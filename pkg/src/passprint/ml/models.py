"""One-vs-rest multi-label models, training, prediction and persistence."""
from __future__ import annotations

import base64
import gzip
import json
import logging
import math
import zlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..dataset import LABEL_NAMES, NUM_LABELS, Dataset
from ..features import NUM_FEATURES
from ..randgen import make_rng
from . import nn, trees
from .metrics import EvalReport, evaluate_predictions

log = logging.getLogger(__name__)

MODEL_FORMAT = "passprint.model"
MODEL_VERSION = 1


class ModelKind(Enum):
    NEURAL_NETWORK = "nn"
    LOGISTIC_REGRESSION = "logreg"
    GRADIENT_BOOSTING = "gboost"
    RANDOM_FOREST = "rforest"
    KNN = "knn"

    @property
    def title(self) -> str:
        return _TITLES[self]


_TITLES = {ModelKind.NEURAL_NETWORK: "Neural Network",
           ModelKind.LOGISTIC_REGRESSION: "Logistic Regression",
           ModelKind.GRADIENT_BOOSTING: "Gradient Boosting",
           ModelKind.RANDOM_FOREST: "Random Forest",
           ModelKind.KNN: "kNN (k = 5)"}

DEFAULT_HYPER = {
    ModelKind.NEURAL_NETWORK: {"hidden": [128, 64], "lr": 1e-3, "batch": 64, "epochs": 100},
    ModelKind.LOGISTIC_REGRESSION: {"lr": 0.5, "iterations": 1000, "l2": 1e-4},
    ModelKind.GRADIENT_BOOSTING: {"rounds": 100, "max_depth": 3, "learning_rate": 0.1},
    ModelKind.RANDOM_FOREST: {"trees": 300, "max_features": math.ceil(math.sqrt(NUM_FEATURES))},
    ModelKind.KNN: {"k": 5},
}


class ModelError(ValueError):
    """Raised for unusable inputs or model files."""


@dataclass
class TrainedModel:
    kind: ModelKind
    mean: np.ndarray
    std: np.ndarray
    params: dict
    hyper: dict
    thresholds: np.ndarray = field(default_factory=lambda: np.full(NUM_LABELS, 0.5))
    seed: int = 0
    training_log: list = field(default_factory=list)

    def normalize(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != len(self.mean):
            raise ModelError(f"expected {len(self.mean)} features, got {X.shape[1]}")
        return (X - self.mean) / self.std


def split_dataset(ds: Dataset, ratio: float = 0.8, seed: int = 0) -> tuple[Dataset, Dataset]:
    if not 0 < ratio < 1:
        raise ValueError("split ratio must lie strictly between 0 and 1")
    order = make_rng(seed).permutation(len(ds))
    cut = int(round(ratio * len(ds)))
    if cut == 0 or cut == len(ds):
        raise ValueError(f"ratio {ratio} leaves an empty split of {len(ds)} samples")
    return ds.subset(order[:cut]), ds.subset(order[cut:])


def normalization_stats(X) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    # constant columns would divide by zero
    return mean, np.where(std > 0, std, 1.0)


# --- per-kind training ---------------------------------------------------

def _fit_nn(Xn, Y, hyper, seed, notes):
    params, history = nn.fit(Xn, Y.astype(float), hidden=tuple(hyper["hidden"]), lr=hyper["lr"],
                             batch=hyper["batch"], epochs=hyper["epochs"], seed=seed)
    notes.append(f"final training loss {history[-1]:.6f}")
    return {"layers": params, "loss_history": history}


def _fit_logreg(Xn, Y, hyper, seed, notes):
    n, d = Xn.shape
    W = np.zeros((d, Y.shape[1]))
    b = np.zeros(Y.shape[1])
    lr, l2 = hyper["lr"], hyper["l2"]
    for _ in range(hyper["iterations"]):
        err = nn.sigmoid(Xn @ W + b) - Y
        W -= lr * (Xn.T @ err / n + l2 * W)
        b -= lr * err.mean(axis=0)
    return {"W": W, "b": b}


def _fit_forest(Xn, Y, hyper, seed, notes):
    out = []
    for j in range(Y.shape[1]):
        y = Y[:, j]
        if y.min() == y.max():
            notes.append(f"label {LABEL_NAMES[j]} has a single class; predicting {int(y[0])}")
            out.append({"const": float(y[0])})
            continue
        ens = trees.fit_forest(Xn, y, hyper["trees"], hyper["max_features"], seed + j)
        out.append({"ensemble": ens})
    return {"labels": out}


def _fit_boosting(Xn, Y, hyper, seed, notes):
    out = []
    for j in range(Y.shape[1]):
        y = Y[:, j]
        if y.min() == y.max():
            notes.append(f"label {LABEL_NAMES[j]} has a single class; predicting {int(y[0])}")
            out.append({"const": float(y[0])})
            continue
        ens, init = trees.fit_boosting(Xn, y, hyper["rounds"], hyper["max_depth"],
                                       hyper["learning_rate"], seed + j)
        out.append({"ensemble": ens, "init": init})
    return {"labels": out}


def _fit_knn(Xn, Y, hyper, seed, notes):
    return {"X": Xn.copy(), "Y": Y.astype(np.int8)}


_FIT = {ModelKind.NEURAL_NETWORK: _fit_nn, ModelKind.LOGISTIC_REGRESSION: _fit_logreg,
        ModelKind.RANDOM_FOREST: _fit_forest, ModelKind.GRADIENT_BOOSTING: _fit_boosting,
        ModelKind.KNN: _fit_knn}


def train(kind, train_set: Dataset, hyper: dict | None = None, seed: int = 0) -> TrainedModel:
    kind = ModelKind(kind)
    if len(train_set) == 0:
        raise ModelError("empty training set")
    hp = dict(DEFAULT_HYPER[kind])
    hp.update(hyper or {})
    mean, std = normalization_stats(train_set.X)
    Xn = (train_set.X - mean) / std
    Y = train_set.Y.astype(float)
    notes = [f"kind={kind.value} seed={seed} samples={len(train_set)} hyper={json.dumps(hp)}"]
    for j, name in enumerate(LABEL_NAMES):
        if Y[:, j].min() == Y[:, j].max():
            notes.append(f"degenerate label {name}: only class {int(Y[0, j])} in training data")
    params = _FIT[kind](Xn, Y, hp, seed, notes)
    for line in notes:
        log.info(line)
    return TrainedModel(kind, mean, std, params, hp, seed=seed, training_log=notes)


# --- prediction ----------------------------------------------------------

def _knn_proba(model, Xn):
    Xt, Yt = model.params["X"], model.params["Y"].astype(float)
    k = model.hyper["k"]
    out = np.empty((len(Xn), Yt.shape[1]))
    sq_t = (Xt ** 2).sum(axis=1)
    for lo in range(0, len(Xn), 512):
        chunk = Xn[lo:lo + 512]
        d = (chunk ** 2).sum(axis=1)[:, None] - 2 * chunk @ Xt.T + sq_t[None, :]
        # stable sort keeps tie-breaking by training index
        nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
        out[lo:lo + 512] = Yt[nearest].mean(axis=1)
    return out


def _ensemble_proba(model, Xn):
    cols = []
    for entry in model.params["labels"]:
        if "const" in entry:
            cols.append(np.full(len(Xn), entry["const"]))
        elif model.kind is ModelKind.RANDOM_FOREST:
            cols.append(trees.forest_proba(entry["ensemble"], Xn))
        else:
            raw = trees.boosting_raw(entry["ensemble"], entry["init"],
                                     model.hyper["learning_rate"], Xn)
            cols.append(nn.sigmoid(raw))
    return np.stack(cols, axis=1)


def predict_proba(model: TrainedModel, X) -> np.ndarray:
    Xn = model.normalize(X)
    if model.kind is ModelKind.NEURAL_NETWORK:
        return nn.sigmoid(nn.logits(model.params["layers"], Xn))
    if model.kind is ModelKind.LOGISTIC_REGRESSION:
        return nn.sigmoid(Xn @ model.params["W"] + model.params["b"])
    if model.kind is ModelKind.KNN:
        return _knn_proba(model, Xn)
    return _ensemble_proba(model, Xn)


def predict(model: TrainedModel, x):
    """(probabilities, decisions); a single feature vector gives 1-D outputs."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if x.shape[-1] != NUM_FEATURES:
        raise ModelError(f"expected {NUM_FEATURES} features, got {x.shape[-1]}")
    proba = predict_proba(model, x)
    decisions = (proba >= model.thresholds).astype(np.int8)
    if single:
        return proba[0], decisions[0]
    return proba, decisions


def evaluate(model: TrainedModel, test_set: Dataset) -> EvalReport:
    if len(test_set) == 0:
        raise ModelError("empty test set")
    _, decisions = predict(model, test_set.X)
    return evaluate_predictions(test_set.Y, decisions, LABEL_NAMES)


# --- persistence ---------------------------------------------------------

def _blob(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a)
    # node indices fit comfortably in 32 bits; halves the file size
    stored = a.astype("<i4") if a.dtype.kind == "i" else a.astype("<f8")
    return {"dtype": stored.dtype.str, "shape": list(a.shape),
            "zlib_b64": base64.b64encode(zlib.compress(stored.tobytes(), 6)).decode("ascii")}


def _unblob(d: dict) -> np.ndarray:
    raw = zlib.decompress(base64.b64decode(d["zlib_b64"]))
    a = np.frombuffer(raw, dtype=np.dtype(d["dtype"])).reshape(d["shape"])
    return a.astype(np.int64) if a.dtype.kind == "i" else a.astype(np.float64)


def _params_to_json(model: TrainedModel) -> dict:
    p = model.params
    k = model.kind
    if k is ModelKind.NEURAL_NETWORK:
        return {"layers": [w.tolist() for w in p["layers"]], "loss_history": list(p["loss_history"])}
    if k is ModelKind.LOGISTIC_REGRESSION:
        return {"W": p["W"].tolist(), "b": p["b"].tolist()}
    if k is ModelKind.KNN:
        return {"X": p["X"].tolist(), "Y": p["Y"].tolist()}
    labels = []
    for entry in p["labels"]:
        if "const" in entry:
            labels.append({"const": entry["const"]})
            continue
        d = {"nodes": {name: _blob(arr) for name, arr in entry["ensemble"].arrays().items()}}
        if "init" in entry:
            d["init"] = entry["init"]
        labels.append(d)
    return {"labels": labels}


def _params_from_json(kind: ModelKind, p: dict) -> dict:
    if kind is ModelKind.NEURAL_NETWORK:
        return {"layers": [np.array(w, dtype=float) for w in p["layers"]],
                "loss_history": list(p.get("loss_history", []))}
    if kind is ModelKind.LOGISTIC_REGRESSION:
        return {"W": np.array(p["W"], dtype=float), "b": np.array(p["b"], dtype=float)}
    if kind is ModelKind.KNN:
        return {"X": np.array(p["X"], dtype=float), "Y": np.array(p["Y"], dtype=np.int8)}
    labels = []
    for entry in p["labels"]:
        if "const" in entry:
            labels.append({"const": float(entry["const"])})
            continue
        ens = trees.TreeEnsemble(**{name: _unblob(b) for name, b in entry["nodes"].items()})
        d = {"ensemble": ens}
        if "init" in entry:
            d["init"] = float(entry["init"])
        labels.append(d)
    return {"labels": labels}


def model_to_json(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind.value,
        "labels": list(LABEL_NAMES),
        "seed": model.seed,
        "hyper": model.hyper,
        "normalization": {"mean": model.mean.tolist(), "std": model.std.tolist()},
        "thresholds": model.thresholds.tolist(),
        "training_log": model.training_log,
        "params": _params_to_json(model),
    }


def model_from_json(doc, expected_kind=None) -> TrainedModel:
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelError("not a model file (missing format tag)")
    if doc.get("version") != MODEL_VERSION:
        raise ModelError(f"model version {doc.get('version')!r}, expected {MODEL_VERSION}")
    try:
        kind = ModelKind(doc.get("kind"))
    except ValueError:
        raise ModelError(f"unknown model kind {doc.get('kind')!r}") from None
    if expected_kind is not None and kind is not ModelKind(expected_kind):
        raise ModelError(f"model file holds a {kind.value} model, expected {ModelKind(expected_kind).value}")
    norm = doc.get("normalization") or {}
    if "mean" not in norm or "std" not in norm:
        raise ModelError("model file lacks normalization statistics")
    mean = np.array(norm["mean"], dtype=float)
    std = np.array(norm["std"], dtype=float)
    if mean.shape != (NUM_FEATURES,) or std.shape != (NUM_FEATURES,):
        raise ModelError(f"normalization statistics must have length {NUM_FEATURES}")
    try:
        params = _params_from_json(kind, doc["params"])
    except (KeyError, TypeError, ValueError, zlib.error) as exc:
        raise ModelError(f"corrupt model parameters: {exc}") from None
    return TrainedModel(kind, mean, std, params, dict(doc.get("hyper", {})),
                        np.array(doc.get("thresholds", [0.5] * NUM_LABELS), dtype=float),
                        int(doc.get("seed", 0)), list(doc.get("training_log", [])))


def _open(path, mode):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def save_model(model: TrainedModel, path) -> None:
    with _open(path, "w") as fh:
        json.dump(model_to_json(model), fh, separators=(",", ":"))


def load_model(path, expected_kind=None) -> TrainedModel:
    try:
        with _open(path, "r") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError, EOFError, gzip.BadGzipFile) as exc:
        raise ModelError(f"corrupt model file: {exc}") from None
    return model_from_json(doc, expected_kind)
