"""Top-th selection, the consistency index and the Kuncheva stability index."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HIGH_STABILITY = 0.5


@dataclass(frozen=True)
class SelectionSet:
    features: frozenset
    n: int

    def __post_init__(self):
        object.__setattr__(self, "features", frozenset(int(i) for i in self.features))
        if not 0 < self.k < self.n:
            raise ValueError(f"selection size must satisfy 0 < k < n, got k={self.k}, n={self.n}")
        if any(i < 0 or i >= self.n for i in self.features):
            raise ValueError("feature index out of range")

    @property
    def k(self) -> int:
        return len(self.features)


def select_top(ranking, th: int) -> SelectionSet:
    n = len(ranking.order)
    if not 1 <= th < n:
        raise ValueError(f"threshold {th} outside [1, {n - 1}]")
    return SelectionSet(frozenset(ranking.order[:th].tolist()), n)


def consistency_index(a: SelectionSet, b: SelectionSet) -> float:
    """Chance-corrected overlap of two equal-size subsets of an n-feature universe."""
    if a.k != b.k or a.n != b.n:
        raise ValueError(f"subsets differ in size or universe: ({a.k}, {a.n}) vs ({b.k}, {b.n})")
    k, n = a.k, a.n
    r = len(a.features & b.features)
    return (r * n - k * k) / (k * (n - k))


def kuncheva_index(sets: Sequence[SelectionSet]) -> float:
    """Mean pairwise consistency index over a family of at least two subsets."""
    sets = list(sets)
    if len(sets) < 2:
        raise ValueError("Kuncheva index needs at least two subsets")
    k, n = sets[0].k, sets[0].n
    if any(s.k != k or s.n != n for s in sets):
        raise ValueError("all subsets must share k and n")
    ind = np.zeros((len(sets), n), dtype=np.int64)
    for i, s in enumerate(sets):
        ind[i, list(s.features)] = 1
    return kuncheva_from_indicator(ind, k, n)


def kuncheva_from_indicator(ind: np.ndarray, k: int, n: int) -> float:
    """KI from an (N, n) 0/1 membership matrix with k ones per row."""
    overlap = ind @ ind.T
    iu = np.triu_indices(ind.shape[0], 1)
    r = overlap[iu]
    # integer numerators keep identical families at exactly 1.0
    ic = (r * n - k * k) / (k * (n - k))
    return float(np.mean(ic))


def top_indicator(orders: np.ndarray, th: int, n: int) -> np.ndarray:
    """Membership matrix of the top-th prefixes of several orders, shape (N, n)."""
    orders = np.asarray(orders)
    ind = np.zeros((orders.shape[0], n), dtype=np.int64)
    np.put_along_axis(ind, orders[:, :th], 1, axis=1)
    return ind
