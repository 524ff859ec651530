"""
Tree ensembles stored as flat node arrays.

Forests and boosted trees are fitted with scikit-learn, then copied into a
:class:`TreeEnsemble` so that in-memory and reloaded models share a single
prediction routine.  Inputs are compared in float32, as scikit-learn does.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF = -1


@dataclass
class TreeEnsemble:
    roots: np.ndarray      # int64, first node of every tree
    feature: np.ndarray    # int64
    threshold: np.ndarray  # float64
    left: np.ndarray       # int64, LEAF for leaves
    right: np.ndarray      # int64
    value: np.ndarray      # float64 leaf output

    @property
    def n_trees(self) -> int:
        return len(self.roots)

    def leaf_values(self, X) -> np.ndarray:
        """(n_trees, n_samples) output of every tree."""
        X = np.asarray(X, dtype=np.float32)
        m = len(X)
        node = np.repeat(self.roots[:, None], m, axis=1)
        ti, si = np.nonzero(self.left[node] != LEAF)
        while len(ti):
            nd = node[ti, si]
            go_left = X[si, self.feature[nd]] <= self.threshold[nd]
            nxt = np.where(go_left, self.left[nd], self.right[nd])
            node[ti, si] = nxt
            keep = self.left[nxt] != LEAF
            ti, si = ti[keep], si[keep]
        return self.value[node]

    def arrays(self) -> dict:
        return {"roots": self.roots, "feature": self.feature, "threshold": self.threshold,
                "left": self.left, "right": self.right, "value": self.value}


def from_sklearn(trees, leaf_value) -> TreeEnsemble:
    """Concatenate fitted sklearn trees; ``leaf_value(tree_) -> per-node output``."""
    roots, feat, thr, left, right, val = [], [], [], [], [], []
    offset = 0
    for t in trees:
        tr = t.tree_
        n = tr.node_count
        is_leaf = tr.children_left == -1
        roots.append(offset)
        feat.append(np.where(is_leaf, 0, tr.feature).astype(np.int64))
        thr.append(np.where(is_leaf, 0.0, tr.threshold).astype(np.float64))
        left.append(np.where(is_leaf, LEAF, tr.children_left + offset).astype(np.int64))
        right.append(np.where(is_leaf, LEAF, tr.children_right + offset).astype(np.int64))
        val.append(np.asarray(leaf_value(tr), dtype=np.float64))
        offset += n
    return TreeEnsemble(np.array(roots, dtype=np.int64), np.concatenate(feat),
                        np.concatenate(thr), np.concatenate(left), np.concatenate(right),
                        np.concatenate(val))


def _class1_fraction(tr):
    v = tr.value[:, 0, :]
    return v[:, 1] / v.sum(axis=1)


def fit_forest(X, y, n_trees=300, max_features=7, seed=0) -> TreeEnsemble:
    from sklearn.ensemble import RandomForestClassifier

    rf = RandomForestClassifier(n_estimators=n_trees, criterion="gini",
                                max_features=max_features, bootstrap=True,
                                random_state=seed, n_jobs=1)
    rf.fit(np.asarray(X, dtype=np.float32), y)
    return from_sklearn(rf.estimators_, _class1_fraction)


def forest_proba(ens: TreeEnsemble, X) -> np.ndarray:
    return ens.leaf_values(X).mean(axis=0)


def fit_boosting(X, y, rounds=100, max_depth=3, learning_rate=0.1, seed=0):
    """(ensemble, initial raw score) of a logistic-loss boosted model."""
    from sklearn.ensemble import GradientBoostingClassifier

    gb = GradientBoostingClassifier(loss="log_loss", n_estimators=rounds, max_depth=max_depth,
                                    learning_rate=learning_rate, random_state=seed)
    X32 = np.asarray(X, dtype=np.float32)
    gb.fit(X32, y)
    ens = from_sklearn(gb.estimators_[:, 0], lambda tr: tr.value[:, 0, 0])
    # the prior log-odds are whatever the decision function adds to the trees
    init = float(gb.decision_function(X32[:1])[0] - learning_rate * ens.leaf_values(X32[:1]).sum())
    return ens, init


def boosting_raw(ens: TreeEnsemble, init: float, learning_rate: float, X) -> np.ndarray:
    return init + learning_rate * ens.leaf_values(X).sum(axis=0)
