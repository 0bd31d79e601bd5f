import numpy as np
import pytest

from hybefs.data import SyntheticSpec, generate_synthetic
from hybefs.experiment import GBMParams, run_experiment, validate_thresholds
from hybefs.gbm import gbm_train, predict_proba
from hybefs.metrics import roc_auc
from hybefs.resampling import DOWNSAMPLE, derive_stream, downsample_balance
from hybefs.stability import SelectionSet, kuncheva_index
from hybefs.strategies import StrategySpec, builtin_roster, roster_by_label

FAST = GBMParams(trees=5)


@pytest.fixture(scope="module")
def data():
    m, _ = generate_synthetic(SyntheticSpec(n_samples=64, n_features=30, n_informative=4, effect_size=1.5,
                                            class_balance=0.6, seed=2))
    return m


@pytest.fixture(scope="module")
def small_roster():
    return builtin_roster(3)


@pytest.fixture(scope="module")
def tracked(data, small_roster):
    return run_experiment(data, small_roster, thresholds=[1, 3, 10], seed=4, gbm=FAST, track=True)


def test_record_counts(tracked, small_roster):
    assert len(tracked.metrics) == len(small_roster) * 5 * 3
    assert len(tracked.stability) == len(small_roster) * 3
    keys = [(r.strategy, r.fold, r.threshold) for r in tracked.metrics]
    assert len(set(keys)) == len(keys)


def test_no_test_rows_reach_rankers_or_trainers(tracked):
    stages = set()
    for fold, stage, rows in tracked.audit:
        stages.add(stage)
        assert not np.any(tracked.folds[rows] == fold)
    assert stages == {"rank", "train"}
    assert sum(1 for _, s, _ in tracked.audit if s == "train") == 5


def test_training_rows_are_balanced(tracked, data):
    for _, stage, rows in tracked.audit:
        if stage == "train":
            assert (data.labels[rows] == 1).sum() == (data.labels[rows] == 0).sum()


def test_stability_from_fold_selections(tracked, data):
    for rec in tracked.stability:
        sets = []
        for f in range(5):
            out = tracked.rankings[(rec.strategy, f)]
            r = out[rec.threshold] if isinstance(out, dict) else out
            sets.append(SelectionSet(frozenset(r.order[: rec.threshold].tolist()), data.n_features))
        assert rec.kuncheva == pytest.approx(kuncheva_index(sets), abs=1e-12)
        assert rec.high_stability == (rec.kuncheva > 0.5)


def test_stability_weighted_uses_threshold_specific_ranking(tracked):
    out = tracked.rankings[("Hyb-EFS-Stb", 0)]
    assert isinstance(out, dict) and set(out) == {1, 3, 10}


def test_metric_recomputed_by_hand(tracked, data):
    """Retrain one (strategy, fold, threshold) cell from scratch and compare."""
    fold, th, label = 2, 3, "Het-EFS"
    test = np.flatnonzero(tracked.folds == fold)
    train = downsample_balance(np.flatnonzero(tracked.folds != fold), data.labels, derive_stream(4, [fold, DOWNSAMPLE]))
    cols = np.sort(tracked.rankings[(label, fold)].order[:th])
    model = gbm_train(data.values[np.ix_(train, cols)], data.labels[train], trees=5)
    expected = roc_auc(predict_proba(model, data.values[np.ix_(test, cols)]), data.labels[test])
    rec = next(r for r in tracked.metrics if (r.strategy, r.fold, r.threshold) == (label, fold, th))
    assert rec.roc_auc == expected


def test_parallel_matches_serial(data):
    specs = [roster_by_label(3)[k] for k in ("Sin-GR", "Hom-ReliefF", "Hyb-EFS-Stb")]
    a = run_experiment(data, specs, thresholds=[2, 5], seed=9, gbm=FAST, workers=1)
    b = run_experiment(data, specs, thresholds=[2, 5], seed=9, gbm=FAST, workers=3)
    assert a.metrics == b.metrics and a.stability == b.stability


def test_stability_only_mode(data):
    res = run_experiment(data, [StrategySpec("single", ("su",))], thresholds=[4], classify=False)
    assert res.metrics == [] and len(res.stability) == 1


def test_threshold_validation():
    assert validate_thresholds([5, 1, 5], 10) == [1, 5]
    with pytest.raises(ValueError):
        validate_thresholds([10], 10)
    with pytest.raises(ValueError):
        validate_thresholds([], 10)


def test_duplicate_labels_rejected(data):
    s = StrategySpec("single", ("gr",))
    with pytest.raises(ValueError, match="unique"):
        run_experiment(data, [s, s], thresholds=[2])
