import itertools

import numpy as np
import pytest

from hybefs.data import ExpressionMatrix


def brute_consistency(a, b, n):
    k = len(a)
    r = len(set(a) & set(b))
    return (r * n - k * k) / (k * (n - k))


def brute_kuncheva(sets, n):
    total, count = 0.0, 0
    for i, j in itertools.combinations(range(len(sets)), 2):
        total += brute_consistency(sets[i], sets[j], n)
        count += 1
    return total / count


def brute_borda(orders, n_f):
    """Explicit point table: position p (1-based) earns n_f - p points."""
    points = [0] * n_f
    for order in orders:
        for p, feat in enumerate(order, start=1):
            points[feat] += n_f - p
    return points


def make_matrix(values, labels):
    values = np.asarray(values, dtype=float)
    names = [f"g{i}" for i in range(values.shape[1])]
    return ExpressionMatrix(values, names, labels)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, title, note = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({note})")
