"""Labeled feature tables: CSV loading, fusion, normalization, splitting.

The on-disk format is a UTF-8 CSV with header ``id,label,f0,...,f{d-1}``,
one sample per row. Tables are value objects; every operation returns a
new table and leaves its inputs untouched.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = [
    "FeatureTable",
    "Normalizer",
    "load_feature_table",
    "save_feature_table",
    "fuse",
    "fit_normalizer",
    "apply_normalizer",
    "split",
]


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Feature matrix (one row per sample) with ids, labels, and the
    ordered class-name list that fixes the label-to-index mapping."""

    sample_ids: list[str]
    features: np.ndarray
    labels: list[str]
    class_names: list[str]

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        if features.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        object.__setattr__(self, "features", features)
        n, d = features.shape
        if n == 0:
            raise DataError("table has no samples")
        if d < 1:
            raise DataError("table has no feature columns")
        if len(self.sample_ids) != n or len(self.labels) != n:
            raise DataError(
                f"row mismatch: {n} feature rows, {len(self.sample_ids)} ids, "
                f"{len(self.labels)} labels"
            )
        if len(set(self.class_names)) != len(self.class_names):
            raise DataError("class names must be distinct")
        known = set(self.class_names)
        for label in self.labels:
            if label not in known:
                raise DataError(f"label {label!r} missing from class names")
        if not np.isfinite(features).all():
            raise DataError("features contain non-finite values")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in self.class_names}
        for label in self.labels:
            counts[label] += 1
        return counts


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Per-column centering and scaling statistics."""

    means: np.ndarray
    stddevs: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float).ravel()
        stddevs = np.asarray(self.stddevs, dtype=float).ravel()
        if means.shape != stddevs.shape:
            raise DataError("means and stddevs must have equal length")
        if not (stddevs > 0).all():
            raise DataError("all stddevs must be > 0")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stddevs", stddevs)

    def to_dict(self) -> dict:
        return {"means": self.means.tolist(), "stddevs": self.stddevs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Normalizer":
        try:
            return cls(means=np.asarray(data["means"]), stddevs=np.asarray(data["stddevs"]))
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed normalizer data: {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "Normalizer":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"malformed normalizer file {path}: {exc}") from exc
        return cls.from_dict(data)


def load_feature_table(path) -> FeatureTable:
    """Read a feature CSV; row order in the file is preserved.

    Distinct failures: missing file, malformed header, ragged rows,
    non-numeric feature cells, duplicate sample ids, empty table.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if len(header) < 3 or header[0] != "id" or header[1] != "label":
            raise DataError(
                f"{path}: header must be 'id,label,f0,...', got {','.join(header)!r}"
            )
        d = len(header) - 2

        ids: list[str] = []
        labels: list[str] = []
        rows: list[list[float]] = []
        seen: set[str] = set()
        for lineno, row in enumerate(reader, start=2):
            if len(row) != d + 2:
                raise DataError(
                    f"{path}:{lineno}: ragged row, expected {d + 2} cells, got {len(row)}"
                )
            sample_id, label = row[0], row[1]
            if sample_id in seen:
                raise DataError(f"{path}:{lineno}: duplicate sample id {sample_id!r}")
            seen.add(sample_id)
            try:
                values = [float(cell) for cell in row[2:]]
            except ValueError:
                raise DataError(
                    f"{path}:{lineno}: non-numeric feature cell in row {sample_id!r}"
                ) from None
            ids.append(sample_id)
            labels.append(label)
            rows.append(values)

    if not rows:
        raise DataError(f"{path}: table has no data rows")
    return FeatureTable(
        sample_ids=ids,
        features=np.array(rows, dtype=float),
        labels=labels,
        class_names=sorted(set(labels)),
    )


def save_feature_table(table: FeatureTable, path) -> None:
    """Write a table in the CSV format load_feature_table reads back."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        header = "id,label," + ",".join(f"f{i}" for i in range(table.n_features))
        fh.write(header + "\n")
        for sample_id, label, row in zip(table.sample_ids, table.labels, table.features):
            cells = ",".join(repr(float(v)) for v in row)
            fh.write(f"{sample_id},{label},{cells}\n")


def fuse(a: FeatureTable, b: FeatureTable) -> FeatureTable:
    """Concatenate two tables column-wise, a's columns first.

    Both tables must describe the same samples (id set equality, equal
    labels per id); the result follows a's sample order and class names.
    """
    ids_a, ids_b = set(a.sample_ids), set(b.sample_ids)
    if ids_a != ids_b:
        only_a = sorted(ids_a - ids_b)[:3]
        only_b = sorted(ids_b - ids_a)[:3]
        raise DataError(
            f"sample id sets differ (only in first: {only_a}, only in second: {only_b})"
        )
    b_row = {sid: i for i, sid in enumerate(b.sample_ids)}
    for sid, label in zip(a.sample_ids, a.labels):
        other = b.labels[b_row[sid]]
        if other != label:
            raise DataError(
                f"label disagreement for id {sid!r}: {label!r} vs {other!r}"
            )
    order = [b_row[sid] for sid in a.sample_ids]
    fused = np.hstack([a.features, b.features[order]])
    return FeatureTable(
        sample_ids=list(a.sample_ids),
        features=fused,
        labels=list(a.labels),
        class_names=list(a.class_names),
    )


def fit_normalizer(table: FeatureTable) -> Normalizer:
    """Per-column mean and population standard deviation; zero-variance
    columns get stddev 1 so dead features pass through unscaled."""
    means = table.features.mean(axis=0)
    stddevs = table.features.std(axis=0)
    stddevs = np.where(stddevs == 0.0, 1.0, stddevs)
    return Normalizer(means=means, stddevs=stddevs)


def apply_normalizer(table: FeatureTable, normalizer: Normalizer) -> FeatureTable:
    """Center and scale every column: (x - mean) / stddev."""
    if table.n_features != normalizer.means.size:
        raise DataError(
            f"table has {table.n_features} columns, normalizer expects "
            f"{normalizer.means.size}"
        )
    scaled = (table.features - normalizer.means) / normalizer.stddevs
    return FeatureTable(
        sample_ids=list(table.sample_ids),
        features=scaled,
        labels=list(table.labels),
        class_names=list(table.class_names),
    )


def split(
    table: FeatureTable, test_fraction: float, seed: int
) -> tuple[FeatureTable, FeatureTable]:
    """Stratified train/test split, deterministic for a fixed seed.

    Each class contributes ceil(count * test_fraction) samples to the test
    side; both sides keep the original row order of the samples they
    receive.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DataError(f"test fraction must be in (0, 1), got {test_fraction}")

    rng = np.random.default_rng(seed)
    labels = np.asarray(table.labels)
    test_idx: list[int] = []
    train_idx: list[int] = []
    for name in table.class_names:
        idx = np.flatnonzero(labels == name)
        if idx.size == 0:
            continue
        if idx.size < 2:
            raise DataError(
                f"class {name!r} has {idx.size} sample(s), need >= 2 to stratify"
            )
        n_test = math.ceil(idx.size * test_fraction)
        if idx.size - n_test < 1:
            raise DataError(
                f"test fraction {test_fraction} leaves no training sample "
                f"for class {name!r}"
            )
        shuffled = rng.permutation(idx)
        test_idx.extend(shuffled[:n_test].tolist())
        train_idx.extend(shuffled[n_test:].tolist())

    return _take(table, sorted(train_idx)), _take(table, sorted(test_idx))


def _take(table: FeatureTable, indices: list[int]) -> FeatureTable:
    return FeatureTable(
        sample_ids=[table.sample_ids[i] for i in indices],
        features=table.features[indices],
        labels=[table.labels[i] for i in indices],
        class_names=list(table.class_names),
    )
