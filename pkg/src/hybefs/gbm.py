"""Small deterministic gradient-boosting classifier (logistic loss, depth-limited
regression trees with exact greedy splits)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

LEAF_CLAMP = 4.0
_MIN_GAIN = 1e-12
_MIN_HESSIAN = 1e-12


@dataclass
class Tree:
    """Array-encoded binary tree; ``feature[i] == -1`` marks a leaf."""

    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def _add(self) -> int:
        for lst, v in ((self.feature, -1), (self.threshold, 0.0), (self.left, -1), (self.right, -1), (self.value, 0.0)):
            lst.append(v)
        return len(self.feature) - 1

    def predict(self, x: np.ndarray) -> np.ndarray:
        node = np.zeros(x.shape[0], dtype=np.intp)
        feature = np.array(self.feature)
        threshold = np.array(self.threshold)
        left, right = np.array(self.left), np.array(self.right)
        active = feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            nd = node[idx]
            go_left = x[idx, feature[nd]] <= threshold[nd]
            node[idx] = np.where(go_left, left[nd], right[nd])
            active = feature[node] >= 0
        return np.array(self.value)[node]


@dataclass
class BoostedModel:
    initial_score: float
    trees: list[Tree]
    learning_rate: float
    n_features: int

    def decision_function(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got shape {x.shape}")
        f = np.full(x.shape[0], self.initial_score)
        for tree in self.trees:
            f += self.learning_rate * tree.predict(x)
        return f


def predict_proba(model: BoostedModel, x) -> np.ndarray:
    return expit(model.decision_function(x))


def _best_split(xs: np.ndarray, rs: np.ndarray, min_leaf: int):
    """Exact greedy least-squares split over presorted columns.

    ``xs``/``rs`` hold each column's values and residuals in ascending value order.
    Ties go to the lowest feature index, then the lowest threshold.
    """
    n = xs.shape[0]
    if n < 2 * min_leaf:
        return None
    cs = np.cumsum(rs, axis=0)
    total = cs[-1]
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    s_left = cs[:-1]
    gain = s_left**2 / n_left + (total - s_left) ** 2 / (n - n_left) - total**2 / n
    valid = xs[:-1] < xs[1:]
    valid[: min_leaf - 1] = False
    valid[n - min_leaf:] = False
    gain = np.where(valid, gain, -np.inf)
    flat = gain.T.ravel()  # feature-major: argmax picks lowest feature, then lowest position
    best = int(np.argmax(flat))
    if not flat[best] > _MIN_GAIN:
        return None
    feat, pos = divmod(best, n - 1)
    lo, hi = xs[pos, feat], xs[pos + 1, feat]
    thr = lo + (hi - lo) / 2
    if not lo <= thr < hi:
        thr = lo
    return feat, float(thr)


def _fit_tree(x, order, residual, hess, depth, min_leaf):
    """Fit one tree; returns it with the leaf value reached by every training row.

    ``order`` is the per-column argsort of ``x``; child nodes inherit it by
    stable filtering instead of re-sorting.
    """
    tree = Tree()
    fitted = np.zeros(x.shape[0])
    cols = np.arange(x.shape[1])
    stack = [(tree._add(), order, 0)]
    while stack:
        node, node_order, level = stack.pop()
        rows = node_order[:, 0]
        split = None
        if level < depth:
            split = _best_split(x[node_order, cols], residual[node_order], min_leaf)
        if split is None:
            v = residual[rows].sum() / max(hess[rows].sum(), _MIN_HESSIAN)
            v = float(np.clip(v, -LEAF_CLAMP, LEAF_CLAMP))
            tree.value[node] = v
            fitted[rows] = v
            continue
        feat, thr = split
        goes_left = np.zeros(x.shape[0], dtype=bool)
        goes_left[rows] = x[rows, feat] <= thr
        mask = goes_left[node_order]
        n_left = int(mask[:, 0].sum())
        f = x.shape[1]
        left_order = node_order.T[mask.T].reshape(f, n_left).T
        right_order = node_order.T[~mask.T].reshape(f, -1).T
        lnode, rnode = tree._add(), tree._add()
        tree.feature[node], tree.threshold[node] = feat, thr
        tree.left[node], tree.right[node] = lnode, rnode
        stack.append((rnode, right_order, level + 1))
        stack.append((lnode, left_order, level + 1))
    return tree, fitted


def gbm_train(x, y, trees: int = 100, depth: int = 3, rate: float = 0.1, min_leaf: int = 2) -> BoostedModel:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("x must be (n_samples, n_features) matching y")
    p_pos = y.mean()
    if p_pos <= 0 or p_pos >= 1:
        raise ValueError("gradient boosting needs both classes in the training labels")
    f0 = float(np.log(p_pos / (1 - p_pos)))
    f = np.full(len(y), f0)
    model = BoostedModel(f0, [], rate, x.shape[1])
    order = np.argsort(x, axis=0, kind="stable")
    for _ in range(trees):
        p = expit(f)
        tree, fitted = _fit_tree(x, order, y - p, p * (1 - p), depth, min_leaf)
        model.trees.append(tree)
        f += rate * fitted
    return model
