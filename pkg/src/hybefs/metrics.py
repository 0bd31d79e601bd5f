"""ROC AUC (Mann-Whitney with midranks) and PR AUC (average precision)."""

import numpy as np
from scipy.stats import rankdata


def roc_auc(scores, labels) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC AUC needs both classes")
    ranks = rankdata(scores, method="average")
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def pr_auc(scores, labels) -> float:
    """Step-wise average precision; tied scores form one threshold block."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise ValueError("PR AUC needs at least one positive")
    order = np.argsort(-scores, kind="stable")
    s, lab = scores[order], labels[order]
    block_end = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.cumsum(lab)[block_end]
    seen = block_end + 1
    precision = tp / seen
    d_recall = np.diff(np.r_[0, tp]) / n_pos
    return float(np.sum(d_recall * precision))
