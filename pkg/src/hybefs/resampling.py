"""Stratified folds, majority-class downsampling and bootstrap bags.

Every stochastic call takes an explicit seed, normally obtained from
:func:`derive_stream` keyed by (fold, bootstrap, purpose), so results do not
depend on execution order.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15

# purpose tags for derive_stream
FOLDS = 1
DOWNSAMPLE = 2
BOOTSTRAP = 3
RETRY = 4

MAX_BOOTSTRAP_RETRIES = 100


def _fmix64(x: int) -> int:
    x ^= x >> 33
    x = (x * 0xFF51AFD7ED558CCD) & _MASK
    x ^= x >> 33
    x = (x * 0xC4CEB93FE53B1A85) & _MASK
    x ^= x >> 33
    return x


def derive_stream(master_seed: int, tags: Sequence[int]) -> int:
    """Mix a master seed and an ordered tag tuple into an independent 64-bit seed."""
    h = _fmix64((master_seed ^ _GOLDEN) & _MASK)
    for t in tags:
        h = _fmix64((h + _GOLDEN + _fmix64((int(t) + _GOLDEN) & _MASK)) & _MASK)
    return h


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed & _MASK)


def stratified_folds(labels, k: int, seed: int) -> np.ndarray:
    """Fold index per sample. Within each class, fold sizes differ by at most one."""
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    folds = np.empty(len(labels), dtype=np.intp)
    rng = _rng(seed)
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < k:
            raise ValueError(f"class {cls} has {len(idx)} samples, fewer than k={k}")
        perm = rng.permutation(idx)
        folds[perm] = np.arange(len(perm)) % k
    return folds


def downsample_balance(indices, labels, seed: int) -> np.ndarray:
    """Drop random majority-class indices until both classes are equally sized.

    ``labels`` is indexed by the entries of ``indices``. The result is sorted;
    because the input is sorted before drawing, it does not depend on input order.
    """
    indices = np.sort(np.asarray(indices, dtype=np.intp))
    labels = np.asarray(labels)
    lab = labels[indices]
    pos, neg = indices[lab == 1], indices[lab == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("downsampling needs both classes present")
    if len(pos) == len(neg):
        return indices
    minority, majority = (pos, neg) if len(pos) < len(neg) else (neg, pos)
    kept = _rng(seed).choice(majority, size=len(minority), replace=False)
    return np.sort(np.concatenate([minority, kept]))


def bootstrap(indices, seed: int, labels=None, min_per_class: int = 1) -> np.ndarray:
    """Same-size draw with replacement from ``indices``.

    With ``labels`` given, bags holding fewer than ``min_per_class`` samples of
    either class are redrawn, at most ``MAX_BOOTSTRAP_RETRIES`` times.
    """
    indices = np.asarray(indices, dtype=np.intp)
    if len(indices) == 0:
        raise ValueError("cannot bootstrap an empty index set")
    bag = _rng(seed).choice(indices, size=len(indices), replace=True)
    if labels is None:
        return bag
    labels = np.asarray(labels)
    for attempt in range(MAX_BOOTSTRAP_RETRIES + 1):
        n_pos = int(labels[bag].sum())
        if min(n_pos, len(bag) - n_pos) >= min_per_class:
            return bag
        if attempt == MAX_BOOTSTRAP_RETRIES:
            break
        bag = _rng(derive_stream(seed, [RETRY, attempt])).choice(indices, size=len(indices), replace=True)
    raise ValueError(
        f"bootstrap produced a degenerate bag {MAX_BOOTSTRAP_RETRIES + 1} times in a row "
        f"(fewer than {min_per_class} samples of a class); input too small"
    )
