"""Cross-validated evaluation: stratified folds, downsampled training sets, feature
selection strictly inside the loop, per-threshold GBM scoring and
across-fold Kuncheva stability."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from hybefs.data import ExpressionMatrix
from hybefs.gbm import gbm_train, predict_proba
from hybefs.metrics import pr_auc, roc_auc
from hybefs.resampling import DOWNSAMPLE, FOLDS, derive_stream, downsample_balance, stratified_folds
from hybefs.stability import HIGH_STABILITY, kuncheva_from_indicator, top_indicator
from hybefs.strategies import RankingCache, StrategySpec, ranking_at, run_strategy

DEFAULT_THRESHOLDS = tuple(range(1, 51)) + (75, 100, 200, 500)


@dataclass(frozen=True)
class GBMParams:
    trees: int = 100
    depth: int = 3
    rate: float = 0.1
    min_leaf: int = 2


@dataclass(frozen=True)
class MetricRecord:
    strategy: str
    fold: int
    threshold: int
    roc_auc: float
    pr_auc: float


@dataclass(frozen=True)
class StabilityRecord:
    strategy: str
    threshold: int
    kuncheva: float

    @property
    def high_stability(self) -> bool:
        return self.kuncheva > HIGH_STABILITY


@dataclass
class ExperimentResult:
    metrics: list[MetricRecord]
    stability: list[StabilityRecord]
    rankings: dict  # (strategy label, fold) -> FeatureRanking or {th: FeatureRanking}
    folds: np.ndarray
    audit: list = field(default_factory=list)  # (fold, stage, global row indices)

    def mean_roc(self, strategy: str, threshold: int) -> float:
        vals = [r.roc_auc for r in self.metrics if r.strategy == strategy and r.threshold == threshold]
        return float(np.mean(vals))

    def kuncheva(self, strategy: str, threshold: int) -> float:
        for r in self.stability:
            if r.strategy == strategy and r.threshold == threshold:
                return r.kuncheva
        raise KeyError((strategy, threshold))


def validate_thresholds(thresholds: Sequence[int], n_features: int) -> list[int]:
    ths = sorted({int(t) for t in thresholds})
    if not ths:
        raise ValueError("no thresholds given")
    bad = [t for t in ths if not 1 <= t < n_features]
    if bad:
        raise ValueError(f"thresholds {bad} outside [1, {n_features - 1}] for {n_features} features")
    return ths


def _run_fold(data: ExpressionMatrix, specs, folds, fold: int, thresholds, seed: int,
              gbm: GBMParams, classify: bool, track: bool):
    test = np.flatnonzero(folds == fold)
    train = np.flatnonzero(folds != fold)
    balanced = downsample_balance(train, data.labels, derive_stream(seed, [fold, DOWNSAMPLE]))
    audit = []

    def on_rows(local_rows):
        if track:
            audit.append((fold, "rank", balanced[local_rows]))

    train_m = data.take(balanced)
    cache = RankingCache(train_m, seed, fold_tag=fold, on_rows=on_rows)
    metrics, outputs = [], {}
    if track and classify:
        audit.append((fold, "train", balanced))
    y_test = data.labels[test]
    for spec in specs:
        try:
            out = run_strategy(train_m, spec, thresholds, seed, fold_tag=fold, cache=cache)
        except Exception as exc:
            raise RuntimeError(f"fold {fold}, strategy {spec.label}: {exc}") from exc
        outputs[spec.label] = out
        if not classify:
            continue
        for th in thresholds:
            cols = np.sort(ranking_at(out, th).order[:th])
            try:
                model = gbm_train(train_m.values[:, cols], train_m.labels, gbm.trees, gbm.depth, gbm.rate, gbm.min_leaf)
                p = predict_proba(model, data.values[np.ix_(test, cols)])
                metrics.append(MetricRecord(spec.label, fold, th, roc_auc(p, y_test), pr_auc(p, y_test)))
            except Exception as exc:
                raise RuntimeError(f"fold {fold}, strategy {spec.label}, threshold {th}: {exc}") from exc
    return fold, metrics, outputs, audit


def run_experiment(data: ExpressionMatrix, specs: Sequence[StrategySpec], k: int = 5,
                   thresholds: Sequence[int] = DEFAULT_THRESHOLDS, seed: int = 0, workers: int = 1,
                   gbm: GBMParams = GBMParams(), classify: bool = True, track: bool = False) -> ExperimentResult:
    """Evaluate every strategy under stratified k-fold CV with downsampling.

    Folds run in parallel when ``workers > 1``; records are assembled in
    (strategy, fold, threshold) order regardless of completion order.
    ``classify=False`` skips the classifier and yields stability records only.
    """
    specs = list(specs)
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError("strategy labels must be unique")
    for s in specs:
        s.validate()
    ths = validate_thresholds(thresholds, data.n_features)
    folds = stratified_folds(data.labels, k, derive_stream(seed, [FOLDS]))

    args = [(data, specs, folds, i, ths, seed, gbm, classify, track) for i in range(k)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=min(workers, k)) as ex:
            results = list(ex.map(_run_fold, *zip(*args)))
    else:
        results = [_run_fold(*a) for a in args]
    results.sort(key=lambda t: t[0])

    order = {lab: i for i, lab in enumerate(labels)}
    metrics = [m for _, ms, _, _ in results for m in ms]
    metrics.sort(key=lambda r: (order[r.strategy], r.fold, r.threshold))
    rankings = {(lab, fold): outs[lab] for fold, _, outs, _ in results for lab in labels}
    audit = [a for *_, au in results for a in au]

    stability = []
    n_f = data.n_features
    for lab in labels:
        for th in ths:
            orders = np.stack([ranking_at(rankings[(lab, f)], th).order for f in range(k)])
            ki = kuncheva_from_indicator(top_indicator(orders, th, n_f), th, n_f)
            stability.append(StabilityRecord(lab, th, ki))
    return ExperimentResult(metrics, stability, rankings, folds, audit)
