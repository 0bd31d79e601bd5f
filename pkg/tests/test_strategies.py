import numpy as np
import pytest

from hybefs.aggregation import borda_aggregate
from hybefs.rankers import RANKERS, geode_rank
from hybefs.resampling import BOOTSTRAP, bootstrap, derive_stream
from hybefs.strategies import (
    RankingCache,
    StrategyError,
    StrategySpec,
    builtin_roster,
    ranking_at,
    roster_by_label,
    run_strategy,
)

from conftest import brute_borda, make_matrix


@pytest.fixture(scope="module")
def small_train():
    rng = np.random.default_rng(5)
    y = np.array([0, 1] * 20)
    x = rng.standard_normal((40, 20))
    x[:, [3, 11]] += 1.5 * y[:, None]
    return make_matrix(x, y)


def test_roster_shape():
    roster = builtin_roster()
    assert len(roster) == 15
    assert len({s.label for s in roster}) == 15
    for s in roster:
        s.validate()
        if s.kind in ("homogeneous", "hybrid"):
            assert s.n_bootstraps == 50
    assert roster_by_label()["Hyb-EFS-Stb"].fam == "stability_weighted"
    assert roster_by_label()["Het-Wx-GR-SU"].algorithms == ("wx", "gr", "su")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="single", algorithms=("gr", "su")),
        dict(kind="single", algorithms=("gr",), n_bootstraps=3),
        dict(kind="homogeneous", algorithms=("gr",), n_bootstraps=1),
        dict(kind="heterogeneous", algorithms=("gr",)),
        dict(kind="heterogeneous", algorithms=("gr", "su"), n_bootstraps=5),
        dict(kind="hybrid", algorithms=("gr",), n_bootstraps=5),
        dict(kind="hybrid", algorithms=("gr", "su"), n_bootstraps=1),
        dict(kind="hybrid", algorithms=("gr", "gr"), n_bootstraps=5),
        dict(kind="heterogeneous", algorithms=("gr", "su"), fam="stability_weighted"),
        dict(kind="single", algorithms=("lasso",)),
        dict(kind="bagging", algorithms=("gr",)),
        dict(kind="hybrid", algorithms=("gr", "su"), n_bootstraps=3, sam="mean"),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(StrategyError):
        StrategySpec(**kwargs)


def test_dict_round_trip():
    for s in builtin_roster(7):
        assert StrategySpec.from_dict(s.to_dict()) == s
    with pytest.raises(StrategyError, match="unknown strategy field"):
        StrategySpec.from_dict({"kind": "single", "algorithms": ["gr"], "weights": 1})


def test_homogeneous_matches_step_by_step(small_train):
    spec = StrategySpec("homogeneous", ("wx",), 50)
    out = run_strategy(small_train, spec, seed=13, fold_tag=2)
    orders = []
    for b in range(50):
        bag = bootstrap(np.arange(40), derive_stream(13, [2, b, BOOTSTRAP]), small_train.labels, min_per_class=2)
        orders.append(list(RANKERS["wx"](small_train.take(bag)).order))
    pts = brute_borda(orders, 20)
    assert list(out.order) == sorted(range(20), key=lambda f: (-pts[f], f))


def test_heterogeneous_is_borda_of_direct_rankings(small_train):
    out = run_strategy(small_train, roster_by_label()["Het-Wx-GR-SU"])
    direct = [RANKERS[a](small_train) for a in ("wx", "gr", "su")]
    assert out == borda_aggregate(direct)


def test_single_is_the_ranker(small_train):
    assert run_strategy(small_train, StrategySpec("single", ("relieff",))) == RANKERS["relieff"](small_train)


def test_degenerate_hybrid_identity(small_train):
    spec = StrategySpec("hybrid", ("gr",), 1, allow_degenerate=True)
    cache = RankingCache(small_train, seed=4)
    out = run_strategy(small_train, spec, cache=cache)
    assert list(out.order) == list(cache.ranking("gr", 0).order)


def test_one_algorithm_hybrid_equals_homogeneous(small_train):
    hyb = StrategySpec("hybrid", ("su",), 6, allow_degenerate=True)
    hom = StrategySpec("homogeneous", ("su",), 6)
    assert list(run_strategy(small_train, hyb, seed=1).order) == list(run_strategy(small_train, hom, seed=1).order)


def test_hybrid_algorithm_order_irrelevant(small_train):
    a = StrategySpec("hybrid", ("gr", "su", "wx"), 4)
    b = StrategySpec("hybrid", ("wx", "gr", "su"), 4)
    assert list(run_strategy(small_train, a, seed=3).order) == list(run_strategy(small_train, b, seed=3).order)


def test_stability_weighted_gives_per_threshold_rankings(small_train):
    spec = StrategySpec("hybrid", ("gr", "su", "wx"), 4, "stability_weighted")
    out = run_strategy(small_train, spec, thresholds=[2, 5], seed=3)
    assert set(out) == {2, 5}
    assert ranking_at(out, 5) is out[5]
    with pytest.raises(ValueError, match="thresholds"):
        run_strategy(small_train, spec, seed=3)


def test_shared_cache_matches_fresh_runs(small_train):
    cache = RankingCache(small_train, seed=8, fold_tag=1)
    for spec in builtin_roster(3)[:12]:
        shared = run_strategy(small_train, spec, seed=8, fold_tag=1, cache=cache)
        fresh = run_strategy(small_train, spec, seed=8, fold_tag=1)
        assert list(shared.order) == list(fresh.order)


def test_deterministic_and_seed_sensitive(small_train):
    spec = StrategySpec("hybrid", ("gr", "relieff"), 5)
    a = run_strategy(small_train, spec, seed=21)
    assert a == run_strategy(small_train, spec, seed=21)
    assert any(run_strategy(small_train, spec, seed=s).scores.tolist() != a.scores.tolist() for s in range(22, 26))


def test_ranker_failure_reports_context(monkeypatch):
    # the rows are the singular-covariance case: GeoDE without shrinkage cannot solve
    m = make_matrix([[0.0, 1, 2], [1, 0, 3], [5, 2, 1], [2, 7, 0]], [0, 0, 1, 1])
    cache = RankingCache(m, seed=0)
    monkeypatch.setitem(RANKERS, "geode_raw", lambda d: geode_rank(d, gamma=0.0, var_fraction=1.0))
    with pytest.raises(RuntimeError, match="'geode_raw' failed on full training set"):
        cache.ranking("geode_raw")


def test_cache_bound_to_its_matrix():
    m = make_matrix([[0.0, 1], [1, 0], [5, 2], [2, 7]], [0, 0, 1, 1])
    cache = RankingCache(m, seed=0)
    with pytest.raises(ValueError, match="different training matrix"):
        run_strategy(make_matrix(m.values, m.labels), StrategySpec("single", ("gr",)), cache=cache)
