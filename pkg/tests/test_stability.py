import numpy as np
import pytest
from hypothesis import given, strategies as st

from hybefs.rankers import FeatureRanking
from hybefs.stability import SelectionSet, consistency_index, kuncheva_index, select_top

from conftest import brute_consistency, brute_kuncheva


def S(items, n):
    return SelectionSet(frozenset(items), n)


def test_consistency_identical():
    a = S(range(5), 100)
    assert consistency_index(a, a) == 1.0


def test_consistency_disjoint():
    assert consistency_index(S({0, 1}, 10), S({2, 3}, 10)) == pytest.approx(-0.25, abs=1e-15)


def test_consistency_partial_overlap():
    a, b = S({0, 1, 2, 3, 4}, 20), S({0, 1, 2, 10, 11}, 20)
    # (3*20 - 25) / (5*15)
    assert consistency_index(a, b) == pytest.approx(35 / 75, abs=1e-15)
    assert consistency_index(a, b) == pytest.approx(0.46667, abs=1e-5)


def test_consistency_rejects_mismatch():
    with pytest.raises(ValueError):
        consistency_index(S({0, 1}, 10), S({0}, 10))


@pytest.mark.parametrize("k", [0, 10])
def test_selection_set_bounds(k):
    with pytest.raises(ValueError):
        S(range(k), 10)


def test_kuncheva_hand_case():
    sets = [S({1, 2}, 10), S({1, 3}, 10), S({4, 5}, 10)]
    assert kuncheva_index(sets) == pytest.approx((0.375 - 0.25 - 0.25) / 3, abs=1e-15)
    assert kuncheva_index(sets) == pytest.approx(-0.041667, abs=1e-6)


def test_kuncheva_identical_sets_exactly_one():
    assert kuncheva_index([S({3, 7, 9}, 50)] * 6) == 1.0


def test_kuncheva_needs_two_sets():
    with pytest.raises(ValueError):
        kuncheva_index([S({1}, 5)])


def test_kuncheva_random_families_match_double_loop(rng):
    for _ in range(100):
        n = int(rng.integers(4, 201))
        k = int(rng.integers(1, n // 2 + 1))
        sets = [rng.choice(n, k, replace=False).tolist() for _ in range(int(rng.integers(2, 11)))]
        got = kuncheva_index([S(s, n) for s in sets])
        assert abs(got - brute_kuncheva(sets, n)) < 1e-12


@given(st.data())
def test_consistency_symmetric_and_bounded(data):
    n = data.draw(st.integers(3, 60))
    k = data.draw(st.integers(1, n - 1))
    a = data.draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True))
    b = data.draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True))
    ab, ba = consistency_index(S(a, n), S(b, n)), consistency_index(S(b, n), S(a, n))
    assert ab == ba
    assert -k / (n - k) - 1e-12 <= ab <= 1 + 1e-12
    assert abs(ab - brute_consistency(a, b, n)) < 1e-12


@given(st.permutations(range(5)))
def test_kuncheva_permutation_invariant(perm):
    sets = [S({0, 1, 2}, 30), S({0, 1, 5}, 30), S({9, 1, 2}, 30), S({4, 5, 6}, 30), S({0, 8, 2}, 30)]
    assert kuncheva_index([sets[i] for i in perm]) == pytest.approx(kuncheva_index(sets), abs=1e-15)


def test_select_top():
    r = FeatureRanking.from_scores([0.1, 0.9, 0.5, 0.7])
    assert select_top(r, 1).features == {1}
    assert select_top(r, 3).features == {1, 3, 2}
    with pytest.raises(ValueError):
        select_top(r, 4)
    with pytest.raises(ValueError):
        select_top(r, 0)


def test_select_top_large_universe(rng):
    r = FeatureRanking.from_scores(rng.standard_normal(20545))
    sel = select_top(r, 50)
    assert sel.k == 50 and sel.n == 20545
