"""Dataset representation, CSV ingestion and the synthetic generator."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass(frozen=True, eq=False)
class ExpressionMatrix:
    """Samples x features matrix with binary labels (1 = positive)."""

    values: np.ndarray
    feature_names: tuple[str, ...]
    labels: np.ndarray
    name: str = field(default="data", compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order="C")
        labels = np.asarray(self.labels)
        if values.ndim != 2:
            raise DataError(f"values must be 2-D, got shape {values.shape}")
        n, f = values.shape
        names = tuple(str(x) for x in self.feature_names)
        if len(names) != f:
            raise DataError(f"{len(names)} feature names for {f} columns")
        if labels.shape != (n,):
            raise DataError(f"{labels.shape[0] if labels.ndim else 0} labels for {n} samples")
        if not np.all(np.isfinite(values)):
            r, c = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at row {r}, column {names[c]!r}")
        if len(set(names)) != f:
            dup = next(x for i, x in enumerate(names) if x in names[:i])
            raise DataError(f"duplicate feature name {dup!r}")
        if not np.all((labels == 0) | (labels == 1)):
            raise DataError("non-binary label")
        labels = labels.astype(np.int8)
        n_pos = int(labels.sum())
        if n_pos < 1 or n - n_pos < 1:
            raise DataError(f"single-class data: {n_pos} positive / {n - n_pos} negative")
        values.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def class_counts(self) -> tuple[int, int]:
        """(negatives, positives)."""
        n_pos = int(self.labels.sum())
        return self.n_samples - n_pos, n_pos

    def take(self, rows) -> "ExpressionMatrix":
        rows = np.asarray(rows, dtype=np.intp)
        return ExpressionMatrix(self.values[rows], self.feature_names, self.labels[rows], self.name)

    def with_columns(self, cols) -> "ExpressionMatrix":
        cols = np.asarray(cols, dtype=np.intp)
        return ExpressionMatrix(
            self.values[:, cols], tuple(self.feature_names[c] for c in cols), self.labels, self.name
        )


def load_csv(path, label_column: str = "class", id_column: str | None = None) -> ExpressionMatrix:
    """Read one sample per row, one feature per column, plus a 0/1 label column.

    ``id_column``, when given, names a column of sample identifiers that is dropped.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise DataError(f"{path}: missing label column {label_column!r}")
        label_pos = header.index(label_column)
        skip = {label_pos}
        if id_column is not None:
            if id_column not in header:
                raise DataError(f"{path}: missing id column {id_column!r}")
            skip.add(header.index(id_column))
        keep = [i for i in range(len(header)) if i not in skip]
        names = [header[i] for i in keep]
        seen: set[str] = set()
        for i, nm in zip(keep, names):
            if nm in seen:
                raise DataError(f"{path}: duplicate feature name {nm!r} (column {i + 1})")
            seen.add(nm)

        rows, labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: line {line_no} has {len(row)} cells, expected {len(header)}")
            try:
                lab = float(row[label_pos])
            except ValueError:
                raise DataError(
                    f"{path}: line {line_no}, column {label_column!r}: non-numeric label {row[label_pos]!r}"
                ) from None
            if lab not in (0.0, 1.0):
                raise DataError(f"{path}: line {line_no}: non-binary label {row[label_pos]!r}")
            labels.append(int(lab))
            try:
                rows.append(np.array([row[i] for i in keep], dtype=np.float64))
            except ValueError:
                for i in keep:
                    try:
                        float(row[i])
                    except ValueError:
                        raise DataError(
                            f"{path}: line {line_no}, column {header[i]!r}: non-numeric cell {row[i]!r}"
                        ) from None
                raise
    if not rows:
        raise DataError(f"{path}: no data rows")
    labels_arr = np.array(labels)
    if len(np.unique(labels_arr)) < 2:
        raise DataError(f"{path}: single-class file (all labels {labels[0]})")
    values = np.vstack(rows) if names else np.empty((len(rows), 0))
    bad = ~np.isfinite(values)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise DataError(f"{path}: line {r + 2}, column {names[c]!r}: non-finite value")
    return ExpressionMatrix(values, tuple(names), labels_arr, name=path.stem)


def format_real(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(m: ExpressionMatrix, path, label_column: str = "class") -> None:
    """Canonical writer: features in order, label column last, 17 significant digits."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*m.feature_names, label_column])
        for row, lab in zip(m.values, m.labels):
            w.writerow([*(format_real(v) for v in row), int(lab)])


@dataclass(frozen=True)
class SyntheticSpec:
    n_samples: int = 200
    n_features: int = 1000
    n_informative: int = 20
    effect_size: float = 2.0
    class_balance: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n_features < 1 or self.n_samples < 4:
            raise ValueError("need n_features >= 1 and n_samples >= 4")
        if not 0 <= self.n_informative <= self.n_features:
            raise ValueError("n_informative must lie in [0, n_features]")
        if self.effect_size < 0:
            raise ValueError("effect_size must be >= 0")
        if not 0 < self.class_balance < 1:
            raise ValueError("class_balance must lie in (0, 1)")


def generate_synthetic(spec: SyntheticSpec) -> tuple[ExpressionMatrix, list[str]]:
    """Gaussian noise matrix with ``n_informative`` planted features.

    Planted columns are chosen at random; their positive-class mean is shifted by
    ``effect_size`` standard deviations, with a random sign per feature.
    """
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed & 0xFFFFFFFFFFFFFFFF))
    n_pos = min(max(int(round(spec.n_samples * spec.class_balance)), 2), spec.n_samples - 2)
    labels = np.zeros(spec.n_samples, dtype=np.int8)
    labels[:n_pos] = 1
    labels = rng.permutation(labels)
    values = rng.standard_normal((spec.n_samples, spec.n_features))
    planted = np.sort(rng.choice(spec.n_features, size=spec.n_informative, replace=False))
    signs = rng.choice([-1.0, 1.0], size=spec.n_informative)
    values[:, planted] += np.outer(labels, signs * spec.effect_size)
    width = max(4, len(str(spec.n_features - 1)))
    names = tuple(f"f{i:0{width}d}" for i in range(spec.n_features))
    m = ExpressionMatrix(values, names, labels, name="synthetic")
    return m, [names[i] for i in planted]


def feature_ids(m: ExpressionMatrix, names: Sequence[str]) -> np.ndarray:
    lookup = {nm: i for i, nm in enumerate(m.feature_names)}
    return np.array([lookup[nm] for nm in names], dtype=np.intp)
