"""Rank aggregation: Borda count, stability-weighted first-stage aggregation and
the two-stage (FAM -> SAM) pipeline of the hybrid ensemble."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from hybefs.rankers import FeatureRanking
from hybefs.stability import kuncheva_from_indicator, top_indicator

WEIGHT_EXPONENT = 5


def _position_matrix(rankings: Sequence[FeatureRanking]) -> np.ndarray:
    rankings = list(rankings)
    if not rankings:
        raise ValueError("nothing to aggregate")
    n_f = rankings[0].n_features
    if any(r.n_features != n_f for r in rankings):
        raise ValueError("rankings cover different feature universes")
    return np.stack([r.positions() for r in rankings])


def borda_points(rankings: Sequence[FeatureRanking]) -> np.ndarray:
    """Integer aggregated score AS_i = sum_j (N_f - p_ij), 1-based positions."""
    pos = _position_matrix(rankings)
    return (pos.shape[1] - pos).sum(axis=0)


def borda_aggregate(rankings: Sequence[FeatureRanking]) -> FeatureRanking:
    return FeatureRanking.from_scores(borda_points(rankings).astype(np.float64))


def weighted_borda(rankings: Sequence[FeatureRanking], weights) -> FeatureRanking:
    """Borda points of each ranking scaled by its weight.

    Points are summed exactly (in integers) within groups of equal weight before
    scaling, so equal weights order features exactly like plain Borda and a
    zero weight removes a ranking entirely.
    """
    pos = _position_matrix(rankings)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (pos.shape[0],):
        raise ValueError("one weight per ranking required")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite and non-negative")
    points = pos.shape[1] - pos
    score = np.zeros(pos.shape[1])
    for w in np.unique(weights):
        if w == 0:
            continue
        score += w * points[weights == w].sum(axis=0)
    return FeatureRanking.from_scores(score)


@dataclass(frozen=True, eq=False)
class RankingGrid:
    """n_bootstraps x m_algorithms rankings over one feature universe."""

    rankings: tuple  # tuple of per-bootstrap tuples
    algorithm_names: tuple[str, ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.rankings)
        object.__setattr__(self, "rankings", rows)
        object.__setattr__(self, "algorithm_names", tuple(self.algorithm_names))
        if not rows or not rows[0]:
            raise ValueError("grid needs n >= 1 and m >= 1")
        m = len(self.algorithm_names)
        if any(len(row) != m for row in rows):
            raise ValueError("every bootstrap must hold one ranking per algorithm")
        n_f = rows[0][0].n_features
        if any(r.n_features != n_f for row in rows for r in row):
            raise ValueError("rankings cover different feature universes")

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return len(self.algorithm_names)

    @property
    def n_features(self) -> int:
        return self.rankings[0][0].n_features

    def column(self, j: int) -> list[FeatureRanking]:
        return [row[j] for row in self.rankings]


def kuncheva_weights(grid: RankingGrid, th: int) -> np.ndarray:
    """Per algorithm: (KI of its n top-th selections + 1) ** 5."""
    n_f = grid.n_features
    if not 1 <= th < n_f:
        raise ValueError(f"threshold {th} outside [1, {n_f - 1}]")
    if grid.n < 2:
        raise ValueError("stability weights need at least 2 bootstraps")
    out = np.empty(grid.m)
    for j in range(grid.m):
        orders = np.stack([r.order for r in grid.column(j)])
        ki = kuncheva_from_indicator(top_indicator(orders, th, n_f), th, n_f)
        out[j] = (ki + 1.0) ** WEIGHT_EXPONENT
    return out


def stability_weighted_fam(grid: RankingGrid, th: int) -> list[FeatureRanking]:
    weights = kuncheva_weights(grid, th)
    return [weighted_borda(row, weights) for row in grid.rankings]


def borda_fam(grid: RankingGrid) -> list[FeatureRanking]:
    return [borda_aggregate(row) for row in grid.rankings]


def two_stage_aggregate(grid: RankingGrid, fam: str = "borda", th: int | None = None) -> FeatureRanking:
    """First stage merges the m rankings inside each bootstrap; the second stage
    (Borda) merges the n per-bootstrap consensus rankings."""
    if fam == "borda":
        per_bootstrap = borda_fam(grid)
    elif fam == "stability_weighted":
        if th is None:
            raise ValueError("stability-weighted aggregation needs a threshold")
        per_bootstrap = stability_weighted_fam(grid, th)
    else:
        raise ValueError(f"unknown first-stage aggregation {fam!r}")
    return borda_aggregate(per_bootstrap)
