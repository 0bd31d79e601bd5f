"""Base feature rankers: gain ratio, symmetrical uncertainty, ReliefF,
characteristic direction (GeoDE) and the softmax discriminative index (Wx).

Each ranker maps an ExpressionMatrix to a FeatureRanking over all features and
has no internal randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from hybefs.data import ExpressionMatrix


@dataclass(frozen=True, eq=False)
class FeatureRanking:
    """Scores (higher = more relevant) and the induced order.

    ``order`` sorts by descending score, ties by ascending feature index.
    """

    scores: np.ndarray
    order: np.ndarray

    @classmethod
    def from_scores(cls, scores) -> "FeatureRanking":
        scores = np.asarray(scores, dtype=np.float64)
        if not np.all(np.isfinite(scores)):
            raise ValueError("ranking scores must be finite")
        order = np.lexsort((np.arange(len(scores)), -scores))
        scores.setflags(write=False)
        order.setflags(write=False)
        return cls(scores, order)

    @classmethod
    def from_order(cls, order) -> "FeatureRanking":
        """Ranking from an explicit order; scores are Borda points of that order."""
        order = np.asarray(order, dtype=np.intp)
        scores = np.empty(len(order))
        scores[order] = np.arange(len(order) - 1, -1, -1)
        return cls.from_scores(scores)

    @property
    def n_features(self) -> int:
        return len(self.order)

    def positions(self) -> np.ndarray:
        """1-based position of every feature."""
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[self.order] = np.arange(1, len(self.order) + 1)
        return pos

    def __eq__(self, other):
        if not isinstance(other, FeatureRanking):
            return NotImplemented
        return np.array_equal(self.order, other.order) and np.array_equal(self.scores, other.scores)

    __hash__ = None


def _canonical_columns(x: np.ndarray) -> np.ndarray:
    """Column order that depends only on column contents, not their positions.

    Computing on columns in this order makes a ranker exactly equivariant to
    feature permutations (summation order over features no longer changes).
    """
    if x.shape[0] == 0:
        return np.arange(x.shape[1])
    return np.lexsort(x[::-1])


# ---------------------------------------------------------------------------
# information-theoretic rankers


def discretize_equal_frequency(column, bins: int = 10) -> np.ndarray:
    """Equal-frequency bins with edges at empirical quantiles; ties share a bin.

    Works column-wise on 2-D input.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    x = np.asarray(column, dtype=np.float64)
    n = x.shape[0]
    first_pos = rankdata(x, method="min", axis=0).astype(np.int64) - 1
    return (first_pos * bins) // n


def entropy(values) -> float:
    """Shannon entropy in bits of a discrete sequence."""
    _, counts = np.unique(np.asarray(values), return_counts=True)
    if counts.size == 0:
        raise ValueError("entropy of an empty sequence")
    p = counts / counts.sum()
    return float(max(0.0, -np.sum(p * np.log2(p))))


def _plogp(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def _entropy_terms(x: np.ndarray, y: np.ndarray, bins: int):
    """H(Y), H(X) and IG(Y; X) for every binned column of x, in bits."""
    b = discretize_equal_frequency(x, bins)
    n = x.shape[0]
    y = np.asarray(y).astype(bool)
    n_pos = y.sum()
    h_y = -float(_plogp(np.array([n_pos / n, 1 - n_pos / n])).sum())
    h_x = np.zeros(x.shape[1])
    h_y_given_x = np.zeros(x.shape[1])
    for v in range(bins):
        in_bin = b == v
        cnt = in_bin.sum(axis=0).astype(np.float64)
        pos = (in_bin & y[:, None]).sum(axis=0).astype(np.float64)
        p_v = cnt / n
        h_x -= _plogp(p_v)
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(cnt > 0, pos / cnt, 0.0)
        h_cond = -(_plogp(q) + _plogp(1 - q))
        h_y_given_x += p_v * h_cond
    ig = np.maximum(h_y - h_y_given_x, 0.0)
    return h_y, h_x, ig


def gain_ratio_scores(m: ExpressionMatrix, bins: int = 10) -> np.ndarray:
    _, h_x, ig = _entropy_terms(m.values, m.labels, bins)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(h_x > 0, ig / h_x, 0.0)


def gain_ratio_rank(m: ExpressionMatrix, bins: int = 10) -> FeatureRanking:
    return FeatureRanking.from_scores(gain_ratio_scores(m, bins))


def symmetrical_uncertainty_scores(m: ExpressionMatrix, bins: int = 10) -> np.ndarray:
    h_y, h_x, ig = _entropy_terms(m.values, m.labels, bins)
    denom = h_x + h_y
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(denom > 0, 2.0 * ig / denom, 0.0)


def symmetrical_uncertainty_rank(m: ExpressionMatrix, bins: int = 10) -> FeatureRanking:
    return FeatureRanking.from_scores(symmetrical_uncertainty_scores(m, bins))


# ---------------------------------------------------------------------------
# ReliefF


def relieff_scores(m: ExpressionMatrix, k_neighbors: int = 10) -> np.ndarray:
    """Deterministic ReliefF: every sample is visited once, in index order.

    Distances are Manhattan over min-max scaled features; neighbour ties go to
    the lower sample index.
    """
    x, y = m.values, m.labels
    n_neg, n_pos = m.class_counts()
    if min(n_neg, n_pos) < 2:
        raise ValueError("ReliefF needs at least 2 samples per class")
    k = min(k_neighbors, min(n_neg, n_pos) - 1)
    if k < 1:
        raise ValueError("k_neighbors must be >= 1")
    span = x.max(axis=0) - x.min(axis=0)
    live = span > 0
    safe_span = np.where(live, span, 1.0)
    t = x.shape[0]
    denom = t * k
    w = np.zeros(x.shape[1])
    for r in range(t):
        diff = np.where(live, np.abs(x - x[r]) / safe_span, 0.0)
        dist = diff.sum(axis=1)
        nearest = np.argsort(dist, kind="stable")
        same = y[nearest] == y[r]
        hits = nearest[same & (nearest != r)][:k]
        misses = nearest[~same][:k]
        miss_sum = (diff[misses] / denom).sum(axis=0)
        hit_sum = (diff[hits] / denom).sum(axis=0)
        w += miss_sum - hit_sum
    return w


def relieff_rank(m: ExpressionMatrix, k_neighbors: int = 10) -> FeatureRanking:
    return FeatureRanking.from_scores(relieff_scores(m, k_neighbors))


# ---------------------------------------------------------------------------
# characteristic direction


def geode_direction(m: ExpressionMatrix, gamma: float = 0.5, var_fraction: float = 0.95) -> np.ndarray:
    """Unit normal of a shrunk linear discriminant fitted in principal-component space."""
    n_neg, n_pos = m.class_counts()
    if min(n_neg, n_pos) < 2:
        raise ValueError("GeoDE needs at least 2 samples per class")
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    canon = _canonical_columns(m.values)
    x = m.values[:, canon]
    y = m.labels.astype(bool)
    n = x.shape[0]
    xc = x - x.mean(axis=0)
    _, s, vt = np.linalg.svd(xc, full_matrices=False)
    var = s**2
    total = var.sum()
    b = np.zeros(x.shape[1])
    if total <= 0:
        return b
    cum = np.cumsum(var) / total
    d = int(np.searchsorted(cum, var_fraction - 1e-12) + 1)
    d = max(1, min(d, n - 1, int(np.count_nonzero(s > s[0] * 1e-12))))
    v = vt[:d].T
    z = xc @ v
    delta = z[y].mean(axis=0) - z[~y].mean(axis=0)
    z0 = z[~y] - z[~y].mean(axis=0)
    z1 = z[y] - z[y].mean(axis=0)
    sigma = (z0.T @ z0 + z1.T @ z1) / (n - 2)
    shrunk = (1 - gamma) * sigma + gamma * (np.trace(sigma) / d) * np.eye(d)
    if np.linalg.matrix_rank(shrunk) < d:
        raise ValueError("singular within-class covariance; use gamma > 0")
    a = np.linalg.solve(shrunk, delta)
    bc = v @ a
    norm = np.linalg.norm(bc)
    if norm > 0:
        b[canon] = bc / norm
    return b


def geode_rank(m: ExpressionMatrix, gamma: float = 0.5, var_fraction: float = 0.95) -> FeatureRanking:
    return FeatureRanking.from_scores(geode_direction(m, gamma, var_fraction) ** 2)


# ---------------------------------------------------------------------------
# Wx


def wx_weights(m: ExpressionMatrix, epochs: int = 100, learning_rate: float = 0.01):
    """Train a zero-initialised two-output softmax model by full-batch gradient descent.

    Returns (weights of shape (n_features, 2), biases, standardized design matrix).
    """
    canon = _canonical_columns(m.values)
    x = m.values[:, canon]
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    live = sd > 0
    z = np.where(live, (x - mu) / np.where(live, sd, 1.0), 0.0)
    n, f = z.shape
    onehot = np.zeros((n, 2))
    onehot[np.arange(n), m.labels] = 1.0
    w = np.zeros((f, 2))
    bias = np.zeros(2)
    for _ in range(epochs):
        logits = z @ w + bias
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        p = e / e.sum(axis=1, keepdims=True)
        g = (p - onehot) / n
        w -= learning_rate * (z.T @ g)
        bias -= learning_rate * g.sum(axis=0)
    out = np.empty_like(w)
    out[canon] = w
    z_out = np.empty_like(z)
    z_out[:, canon] = z
    return out, bias, z_out


def wx_scores(m: ExpressionMatrix, epochs: int = 100, learning_rate: float = 0.01) -> np.ndarray:
    """Discriminative index: class difference of each feature's mean contribution
    to the class-1 vs class-0 logit margin, |(w1 - w0) * (mean1 - mean0)|.

    The per-class form |w0 * mean0 - w1 * mean1| is not used: zero init keeps
    w1 == -w0, so it reduces to |w0| * |mean0 + mean1|, which vanishes on
    class-balanced standardized data.
    """
    w, _, z = wx_weights(m, epochs, learning_rate)
    y = m.labels.astype(bool)
    mean0 = z[~y].mean(axis=0)
    mean1 = z[y].mean(axis=0)
    return np.abs((w[:, 1] - w[:, 0]) * (mean1 - mean0))


def wx_rank(m: ExpressionMatrix, epochs: int = 100, learning_rate: float = 0.01) -> FeatureRanking:
    return FeatureRanking.from_scores(wx_scores(m, epochs, learning_rate))


RANKERS = {
    "gr": gain_ratio_rank,
    "su": symmetrical_uncertainty_rank,
    "relieff": relieff_rank,
    "geode": geode_rank,
    "wx": wx_rank,
}

DISPLAY_NAMES = {"gr": "GR", "su": "SU", "relieff": "ReliefF", "geode": "GeoDE", "wx": "Wx"}
