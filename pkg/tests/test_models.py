import json

import numpy as np
import pytest

from passprint.dataset import BuilderConfig, Dataset, build_dataset
from passprint.ml import models as M
from passprint.ml.models import ModelError, ModelKind

FAST = {
    ModelKind.NEURAL_NETWORK: {"hidden": [16], "epochs": 3},
    ModelKind.LOGISTIC_REGRESSION: {"iterations": 100},
    ModelKind.GRADIENT_BOOSTING: {"rounds": 5},
    ModelKind.RANDOM_FOREST: {"trees": 10},
    ModelKind.KNN: {},
}


@pytest.fixture(scope="module")
def data():
    ds = build_dataset(BuilderConfig(samples=250, q_min=4, q_max=6, depth=15, seed=1))
    return M.split_dataset(ds, 0.8, 0)


def test_split_sizes_and_determinism():
    ds = Dataset(np.arange(10000 * 46).reshape(10000, 46), np.ones((10000, 7)))
    tr, te = M.split_dataset(ds, 0.8, 3)
    assert (len(tr), len(te)) == (8000, 2000)
    tr2, _ = M.split_dataset(ds, 0.8, 3)
    assert np.array_equal(tr.X, tr2.X)
    ids = np.concatenate([tr.X[:, 0], te.X[:, 0]])
    assert sorted(ids) == list(ds.X[:, 0])
    for bad in (0, 1, -0.5):
        with pytest.raises(ValueError):
            M.split_dataset(ds, bad, 0)
    with pytest.raises(ValueError):
        M.split_dataset(ds.subset([0]), 0.5, 0)


def test_defaults():
    assert M.DEFAULT_HYPER[ModelKind.RANDOM_FOREST]["trees"] == 300
    assert M.DEFAULT_HYPER[ModelKind.RANDOM_FOREST]["max_features"] == 7
    assert M.DEFAULT_HYPER[ModelKind.KNN]["k"] == 5
    assert M.DEFAULT_HYPER[ModelKind.NEURAL_NETWORK]["hidden"] == [128, 64]


def test_forest_default_tree_count(data):
    tr, _ = data
    model = M.train(ModelKind.RANDOM_FOREST, tr.subset(range(60)))
    assert all(e["ensemble"].n_trees == 300 for e in model.params["labels"] if "ensemble" in e)


def test_forest_matches_sklearn_probabilities(data):
    from sklearn.ensemble import RandomForestClassifier
    tr, te = data
    model = M.train(ModelKind.RANDOM_FOREST, tr, {"trees": 15}, seed=4)
    Xn, Xt = model.normalize(tr.X), model.normalize(te.X)
    rf = RandomForestClassifier(n_estimators=15, max_features=7, random_state=4, n_jobs=1)
    rf.fit(Xn.astype(np.float32), tr.Y[:, 0])
    ours = M.predict_proba(model, te.X)[:, 0]
    assert np.allclose(ours, rf.predict_proba(Xt.astype(np.float32))[:, 1], atol=1e-12)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_train_predict_save_load(kind, data, tmp_path):
    tr, te = data
    model = M.train(kind, tr, FAST[kind], seed=2)
    proba, dec = M.predict(model, te.X[0])
    assert proba.shape == (7,) and dec.shape == (7,)
    assert np.all((proba >= 0) & (proba <= 1))
    for name in ("m.json", "m.json.gz"):
        M.save_model(model, tmp_path / name)
        back = M.load_model(tmp_path / name, kind)
        a, _ = M.predict(model, te.X[:100])
        b, _ = M.predict(back, te.X[:100])
        assert np.array_equal(a, b)
    again = M.train(kind, tr, FAST[kind], seed=2)
    assert M.evaluate(again, te) == M.evaluate(model, te)


def test_normalization_uses_training_split(data):
    tr, _ = data
    model = M.train(ModelKind.KNN, tr)
    assert np.array_equal(model.mean, tr.X.mean(axis=0))
    std = tr.X.std(axis=0)
    assert np.array_equal(model.std, np.where(std > 0, std, 1.0))


def test_logreg_separable_toy():
    rng = np.random.default_rng(0)
    X = np.zeros((200, 46))
    X[:, :2] = rng.normal(size=(200, 2))
    y = (X[:, 0] + 2 * X[:, 1] > 0).astype(int)
    X[:, 0] += np.where(y == 1, 0.5, -0.5)
    Y = np.repeat(y[:, None], 7, axis=1)
    ds = Dataset(X, Y)
    model = M.train(ModelKind.LOGISTIC_REGRESSION, ds, {"iterations": 3000, "lr": 1.0})
    _, dec = M.predict(model, X)
    assert np.array_equal(dec, Y)


def test_knn_unanimous_vote():
    X = np.zeros((10, 46))
    X[5:, 0] = 100
    Y = np.zeros((10, 7), dtype=int)
    Y[:5, 2] = 1
    model = M.train(ModelKind.KNN, Dataset(X, Y))
    proba, dec = M.predict(model, np.zeros(46))
    assert proba[2] == 1.0 and dec[2] == 1 and proba[3] == 0.0


@pytest.mark.parametrize("kind", [ModelKind.RANDOM_FOREST, ModelKind.GRADIENT_BOOSTING,
                                  ModelKind.LOGISTIC_REGRESSION])
def test_degenerate_label_is_constant(kind, data):
    tr, te = data
    Y = tr.Y.copy()
    Y[:, 6] = 0
    model = M.train(kind, Dataset(tr.X, Y), FAST[kind])
    assert any("Miscellaneous" in line for line in model.training_log)
    _, dec = M.predict(model, te.X)
    assert not dec[:, 6].any()


def test_input_length_checked(data):
    tr, _ = data
    model = M.train(ModelKind.KNN, tr)
    with pytest.raises(ModelError):
        M.predict(model, np.zeros(45))


def test_model_file_errors(data, tmp_path):
    tr, _ = data
    model = M.train(ModelKind.LOGISTIC_REGRESSION, tr, FAST[ModelKind.LOGISTIC_REGRESSION])
    path = tmp_path / "m.json"
    M.save_model(model, path)
    with pytest.raises(ModelError, match="expected knn"):
        M.load_model(path, ModelKind.KNN)
    doc = json.loads(path.read_text())

    def broken(mutate):
        d = json.loads(json.dumps(doc))
        mutate(d)
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(d))
        return p

    with pytest.raises(ModelError, match="normalization"):
        M.load_model(broken(lambda d: d.pop("normalization")))
    with pytest.raises(ModelError, match="version"):
        M.load_model(broken(lambda d: d.update(version=99)))
    with pytest.raises(ModelError, match="unknown model kind"):
        M.load_model(broken(lambda d: d.update(kind="svm")))
    with pytest.raises(ModelError, match="corrupt"):
        M.load_model(broken(lambda d: d["params"].pop("W")))
    p = tmp_path / "trunc.json"
    p.write_text(path.read_text()[:100])
    with pytest.raises(ModelError):
        M.load_model(p)
    p = tmp_path / "junk.json.gz"
    p.write_bytes(b"not gzip")
    with pytest.raises(ModelError):
        M.load_model(p)
    p = tmp_path / "list.json"
    p.write_text("[]")
    with pytest.raises(ModelError):
        M.load_model(p)


def test_nn_loss_non_increasing_first_epochs(data):
    tr, _ = data
    model = M.train(ModelKind.NEURAL_NETWORK, tr, {"epochs": 5})
    h = model.params["loss_history"]
    assert all(b <= a + 1e-6 for a, b in zip(h, h[1:]))
