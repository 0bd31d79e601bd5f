"""Strategy declarations and the runner that turns a training matrix into a final
feature ranking (or one ranking per threshold for stability-weighted hybrids)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from hybefs.aggregation import RankingGrid, borda_aggregate, two_stage_aggregate
from hybefs.data import ExpressionMatrix
from hybefs.rankers import DISPLAY_NAMES, RANKERS, FeatureRanking
from hybefs.resampling import BOOTSTRAP, bootstrap, derive_stream

KINDS = ("single", "homogeneous", "heterogeneous", "hybrid")
FAMS = ("borda", "stability_weighted")


class StrategyError(ValueError):
    pass


@dataclass(frozen=True)
class StrategySpec:
    kind: str
    algorithms: tuple[str, ...]
    n_bootstraps: int = 0
    fam: str = "borda"
    sam: str = "borda"
    label: str = ""
    allow_degenerate: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.label:
            object.__setattr__(self, "label", _default_label(self))
        self.validate()

    def validate(self) -> None:
        algs = self.algorithms
        if self.kind not in KINDS:
            raise StrategyError(f"{self.label}: unknown kind {self.kind!r}")
        if not algs:
            raise StrategyError(f"{self.label}: no algorithms")
        unknown = [a for a in algs if a not in RANKERS]
        if unknown:
            raise StrategyError(f"{self.label}: unknown algorithm(s) {unknown}")
        if len(set(algs)) != len(algs):
            raise StrategyError(f"{self.label}: repeated algorithm")
        if self.fam not in FAMS:
            raise StrategyError(f"{self.label}: unknown fam {self.fam!r}")
        if self.sam != "borda":
            raise StrategyError(f"{self.label}: only borda is supported as second-stage aggregation")
        if self.fam == "stability_weighted" and self.kind != "hybrid":
            raise StrategyError(f"{self.label}: stability-weighted aggregation requires a hybrid strategy")
        if self.kind == "single":
            if len(algs) != 1 or self.n_bootstraps != 0:
                raise StrategyError(f"{self.label}: single needs exactly one algorithm and no bootstraps")
        elif self.kind == "homogeneous":
            if len(algs) != 1 or self.n_bootstraps < 2:
                raise StrategyError(f"{self.label}: homogeneous needs one algorithm and >= 2 bootstraps")
        elif self.kind == "heterogeneous":
            if len(algs) < 2 or self.n_bootstraps != 0:
                raise StrategyError(f"{self.label}: heterogeneous needs >= 2 algorithms and no bootstraps")
        elif self.kind == "hybrid" and not self.allow_degenerate:
            if len(algs) < 2 or self.n_bootstraps < 2:
                raise StrategyError(f"{self.label}: hybrid needs >= 2 algorithms and >= 2 bootstraps")
        elif self.kind == "hybrid" and self.n_bootstraps < 1:
            raise StrategyError(f"{self.label}: hybrid needs >= 1 bootstrap")

    @property
    def per_threshold(self) -> bool:
        return self.fam == "stability_weighted"

    def with_bootstraps(self, n: int) -> "StrategySpec":
        if self.kind in ("single", "heterogeneous"):
            return self
        return StrategySpec(self.kind, self.algorithms, n, self.fam, self.sam, self.label, self.allow_degenerate)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind,
            "algorithms": list(self.algorithms),
            "n_bootstraps": self.n_bootstraps,
            "fam": self.fam,
            "sam": self.sam,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StrategySpec":
        extra = set(d) - {"label", "kind", "algorithms", "n_bootstraps", "fam", "sam"}
        if extra:
            raise StrategyError(f"unknown strategy field(s) {sorted(extra)}")
        return cls(
            kind=d.get("kind", ""),
            algorithms=tuple(d.get("algorithms", ())),
            n_bootstraps=int(d.get("n_bootstraps", 0)),
            fam=d.get("fam", "borda"),
            sam=d.get("sam", "borda"),
            label=d.get("label", ""),
        )


def _default_label(spec: StrategySpec) -> str:
    names = "-".join(DISPLAY_NAMES.get(a, a) for a in spec.algorithms)
    prefix = {"single": "Sin", "homogeneous": "Hom", "heterogeneous": "Het", "hybrid": "Hyb"}.get(spec.kind, spec.kind)
    return f"{prefix}-{names}"


ALL_ALGORITHMS = ("gr", "su", "relieff", "geode", "wx")
WX_GR_SU = ("wx", "gr", "su")


def builtin_roster(n_bootstraps: int = 50) -> list[StrategySpec]:
    """The fifteen reference strategies."""
    roster = [StrategySpec("single", (a,), label=f"Sin-{DISPLAY_NAMES[a]}") for a in ALL_ALGORITHMS]
    roster += [
        StrategySpec("homogeneous", (a,), n_bootstraps, label=f"Hom-{DISPLAY_NAMES[a]}") for a in ALL_ALGORITHMS
    ]
    roster += [
        StrategySpec("heterogeneous", ALL_ALGORITHMS, label="Het-EFS"),
        StrategySpec("heterogeneous", WX_GR_SU, label="Het-Wx-GR-SU"),
        StrategySpec("hybrid", ALL_ALGORITHMS, n_bootstraps, "borda", label="Hyb-EFS-Borda"),
        StrategySpec("hybrid", ALL_ALGORITHMS, n_bootstraps, "stability_weighted", label="Hyb-EFS-Stb"),
        StrategySpec("hybrid", WX_GR_SU, n_bootstraps, "stability_weighted", label="Hyb-Wx-GR-SU"),
    ]
    return roster


def roster_by_label(n_bootstraps: int = 50) -> dict[str, StrategySpec]:
    return {s.label: s for s in builtin_roster(n_bootstraps)}


class RankingCache:
    """Memoises ranker outputs per (algorithm, bootstrap) for one training matrix.

    Bootstrap ``b`` always draws the same bag for a given seed and fold tag, so
    homogeneous and hybrid strategies on the same fold share grid cells.
    ``on_rows`` is called with the row indices (into the training matrix) of
    every matrix handed to a ranker.
    """

    def __init__(self, train: ExpressionMatrix, seed: int, fold_tag: int = 0,
                 on_rows: Callable[[np.ndarray], None] | None = None):
        self.train = train
        self.seed = seed
        self.fold_tag = fold_tag
        self.on_rows = on_rows
        self._bags: dict[int, np.ndarray] = {}
        self._rankings: dict[tuple[str, int | None], FeatureRanking] = {}

    def bag(self, b: int) -> np.ndarray:
        if b not in self._bags:
            # 2 per class keeps every ranker's precondition satisfied on the bag
            self._bags[b] = bootstrap(
                np.arange(self.train.n_samples),
                derive_stream(self.seed, [self.fold_tag, b, BOOTSTRAP]),
                labels=self.train.labels,
                min_per_class=2,
            )
        return self._bags[b]

    def ranking(self, algorithm: str, b: int | None = None) -> FeatureRanking:
        key = (algorithm, b)
        if key not in self._rankings:
            rows = np.arange(self.train.n_samples) if b is None else self.bag(b)
            if self.on_rows is not None:
                self.on_rows(rows)
            data = self.train if b is None else self.train.take(rows)
            try:
                self._rankings[key] = RANKERS[algorithm](data)
            except Exception as exc:
                where = "full training set" if b is None else f"bootstrap {b}"
                raise RuntimeError(f"ranker {algorithm!r} failed on {where}: {exc}") from exc
        return self._rankings[key]

    def grid(self, algorithms: Iterable[str], n_bootstraps: int) -> RankingGrid:
        algorithms = tuple(algorithms)
        return RankingGrid(
            tuple(tuple(self.ranking(a, b) for a in algorithms) for b in range(n_bootstraps)), algorithms
        )


def run_strategy(train: ExpressionMatrix, spec: StrategySpec, thresholds=(), seed: int = 0,
                 fold_tag: int = 0, cache: RankingCache | None = None):
    """Final ranking for ``spec``, or ``{th: ranking}`` for stability-weighted hybrids."""
    spec.validate()
    if cache is None:
        cache = RankingCache(train, seed, fold_tag)
    elif cache.train is not train:
        raise ValueError("cache was built for a different training matrix")
    algs = spec.algorithms
    if spec.kind == "single":
        return cache.ranking(algs[0])
    if spec.kind == "heterogeneous":
        return borda_aggregate([cache.ranking(a) for a in algs])
    if spec.kind == "homogeneous":
        return borda_aggregate([cache.ranking(algs[0], b) for b in range(spec.n_bootstraps)])
    grid = cache.grid(algs, spec.n_bootstraps)
    if spec.fam == "borda":
        return two_stage_aggregate(grid, "borda")
    thresholds = [int(t) for t in thresholds]
    if not thresholds:
        raise ValueError(f"{spec.label}: stability-weighted aggregation needs thresholds")
    return {th: two_stage_aggregate(grid, "stability_weighted", th) for th in thresholds}


def ranking_at(output, th: int) -> FeatureRanking:
    """The ranking a strategy output uses for selecting ``th`` features."""
    return output[th] if isinstance(output, dict) else output
