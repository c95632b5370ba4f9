"""Dataset loading, feature ranking and selection, angle scaling, and a
synthetic request-feature generator.

Labels are +1 ("valid", CSV value 1) or -1 ("invalid", CSV value 0).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, DataFormatError

VALID = 1
INVALID = -1
LABEL_COLUMN = "label"

_LABEL_NAMES = {VALID: "valid", INVALID: "invalid"}


def label_name(value: int) -> str:
    return _LABEL_NAMES[int(value)]


@dataclass(frozen=True)
class Dataset:
    feature_names: tuple[str, ...]
    rows: np.ndarray  # (m, F) float
    labels: np.ndarray  # (m,) of +1 / -1
    importance_order: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        rows = np.asarray(self.rows, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        if rows.ndim != 2 or rows.shape[1] != len(self.feature_names):
            raise ValueError("row width must match the number of feature names")
        if labels.shape != (rows.shape[0],):
            raise ValueError("one label per row required")
        if not np.all(np.isin(labels, (VALID, INVALID))):
            raise ValueError("labels must be +1 (valid) or -1 (invalid)")
        if self.importance_order is not None:
            order = tuple(self.importance_order)
            if len(set(order)) != len(order):
                raise ValueError("importance order contains duplicates")
            unknown = set(order) - set(self.feature_names)
            if unknown:
                raise ValueError(f"importance order names unknown features: {sorted(unknown)}")
            object.__setattr__(self, "importance_order", order)

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def num_features(self) -> int:
        return len(self.feature_names)


def load_csv(path) -> Dataset:
    """Read a dataset CSV: header, numeric feature columns, and a ``label``
    column holding 1 (valid) / 0 (invalid). Row order is preserved."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if LABEL_COLUMN not in header:
            raise DataFormatError(f"{path}: missing required column {LABEL_COLUMN!r}")
        label_idx = header.index(LABEL_COLUMN)
        names = [h for i, h in enumerate(header) if i != label_idx]
        rows: list[list[float]] = []
        labels: list[int] = []
        for row_num, cells in enumerate(reader, start=1):
            if not cells:
                continue
            if len(cells) != len(header):
                raise DataFormatError(
                    f"{path}: row {row_num} has {len(cells)} cells, expected {len(header)}"
                )
            raw_label = cells[label_idx].strip()
            if raw_label == "1":
                labels.append(VALID)
            elif raw_label == "0":
                labels.append(INVALID)
            else:
                raise DataFormatError(
                    f"{path}: row {row_num} column {LABEL_COLUMN!r}: "
                    f"expected 0 or 1, got {raw_label!r}"
                )
            values = []
            for i, cell in enumerate(cells):
                if i == label_idx:
                    continue
                name = header[i]
                try:
                    value = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"{path}: row {row_num} column {name!r}: non-numeric value {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise DataFormatError(
                        f"{path}: row {row_num} column {name!r}: non-finite value {cell!r}"
                    )
                values.append(value)
            rows.append(values)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return Dataset(tuple(names), np.array(rows), np.array(labels))


def write_csv(dataset: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(dataset.feature_names) + [LABEL_COLUMN])
        for row, label in zip(dataset.rows, dataset.labels):
            writer.writerow(
                [repr(float(v)) for v in row] + ["1" if label == VALID else "0"]
            )


def read_importance(path) -> tuple[str, ...]:
    """Importance file: one feature name per line, most important first."""
    with open(path) as fh:
        names = [line.strip() for line in fh if line.strip()]
    if not names:
        raise DataFormatError(f"{path}: empty importance file")
    if len(set(names)) != len(names):
        raise DataFormatError(f"{path}: duplicate names in importance file")
    return tuple(names)


def write_importance(names, path) -> None:
    with open(path, "w") as fh:
        fh.writelines(name + "\n" for name in names)


def point_biserial(column: np.ndarray, labels: np.ndarray) -> float:
    """Pearson correlation between a feature column and the binary label;
    0.0 for a constant column."""
    x = column - column.mean()
    y = labels - labels.mean()
    sx = math.sqrt(float(x @ x))
    sy = math.sqrt(float(y @ y))
    if sx == 0.0 or sy == 0.0:
        return 0.0
    return float(x @ y) / (sx * sy)


def rank_features(dataset: Dataset) -> tuple[str, ...]:
    """Feature names sorted by |point-biserial correlation| with the label,
    descending; ties keep column order."""
    if dataset.num_rows < 2:
        raise ValueError("ranking needs at least 2 rows")
    scores = [
        abs(point_biserial(dataset.rows[:, i], dataset.labels))
        for i in range(dataset.num_features)
    ]
    order = sorted(range(dataset.num_features), key=lambda i: (-scores[i], i))
    return tuple(dataset.feature_names[i] for i in order)


def with_importance(dataset: Dataset, order=None) -> Dataset:
    """Attach an importance order (given, or ranked from the data)."""
    if order is None:
        order = rank_features(dataset)
    return replace(dataset, importance_order=tuple(order))


def select_top_k(dataset: Dataset, k: int) -> Dataset:
    """Restrict to the first k features of the importance order."""
    if dataset.importance_order is None:
        raise ConfigurationError(
            "dataset has no importance order; attach one with with_importance()"
        )
    if not 1 <= k <= len(dataset.importance_order):
        raise ConfigurationError(
            f"k must be in 1..{len(dataset.importance_order)}, got {k}"
        )
    keep = dataset.importance_order[:k]
    indices = [dataset.feature_names.index(name) for name in keep]
    return Dataset(keep, dataset.rows[:, indices], dataset.labels, keep)


@dataclass(frozen=True)
class ScalingSpec:
    """Per-feature (min, max) observed on the training split; encoding maps
    the observed range onto [0, pi]."""

    minima: np.ndarray
    maxima: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.minima, dtype=float)
        maxs = np.asarray(self.maxima, dtype=float)
        object.__setattr__(self, "minima", mins)
        object.__setattr__(self, "maxima", maxs)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValueError("minima and maxima must be 1-D with equal length")
        if np.any(mins > maxs):
            raise ValueError("per-feature minimum exceeds maximum")

    @property
    def num_features(self) -> int:
        return self.minima.size


def fit_scaling(train: Dataset) -> ScalingSpec:
    return ScalingSpec(train.rows.min(axis=0), train.rows.max(axis=0))


def apply_scaling(spec: ScalingSpec, values: np.ndarray) -> np.ndarray:
    """Map raw feature values into [0, pi]; out-of-range values are clamped
    and constant training columns map to 0."""
    x = np.asarray(values, dtype=float)
    if x.shape[-1] != spec.num_features:
        raise ValueError(
            f"expected {spec.num_features} features, got {x.shape[-1]}"
        )
    span = spec.maxima - spec.minima
    safe_span = np.where(span == 0.0, 1.0, span)
    scaled = math.pi * (x - spec.minima) / safe_span
    scaled = np.where(span == 0.0, 0.0, scaled)
    return np.clip(scaled, 0.0, math.pi)


def generate_synthetic(
    m: int, num_features: int, class_separation: float, seed: int
) -> Dataset:
    """Two unit-variance Gaussian clusters whose means are separated by
    ``class_separation`` along a direction inside the informative feature
    subspace; the remaining features are pure noise.

    The separation direction weights the first informative feature most, so
    the declared importance order (informative features by weight, then noise
    features) matches what correlation ranking would recover on large samples.
    Deterministic in ``seed``; labels are balanced.
    """
    if m < 2:
        raise ConfigurationError(f"m must be >= 2, got {m}")
    if num_features < 2:
        raise ConfigurationError(f"num_features must be >= 2, got {num_features}")
    rng = np.random.default_rng(seed)
    num_informative = max(1, num_features // 2)
    num_noise = num_features - num_informative

    weights = np.empty(num_informative)
    weights[0] = 1.0
    if num_informative > 1:
        weights[1:] = rng.uniform(0.15, 0.35, size=num_informative - 1)
    signs = np.where(rng.uniform(size=num_informative) < 0.5, -1.0, 1.0)
    direction = weights * signs
    direction /= np.linalg.norm(direction)

    labels = np.concatenate(
        [np.full(m // 2, VALID), np.full(m - m // 2, INVALID)]
    )
    informative = rng.normal(size=(m, num_informative))
    informative += np.outer(labels, 0.5 * class_separation * direction)
    noise = rng.normal(size=(m, num_noise))

    columns = np.empty((m, num_features))
    placement = rng.permutation(num_features)
    informative_cols = placement[:num_informative]
    noise_cols = placement[num_informative:]
    columns[:, informative_cols] = informative
    columns[:, noise_cols] = noise

    order_rows = rng.permutation(m)
    columns = columns[order_rows]
    labels = labels[order_rows]

    names = tuple(f"feature_{i}" for i in range(num_features))
    by_weight = np.argsort(-np.abs(direction), kind="stable")
    importance = tuple(names[informative_cols[i]] for i in by_weight) + tuple(
        names[c] for c in sorted(noise_cols)
    )
    return Dataset(names, columns, labels, importance)


def generate_train_test(
    train_size: int,
    test_size: int,
    num_features: int,
    class_separation: float,
    seed: int,
) -> tuple[Dataset, Dataset]:
    """One synthetic draw split into train and test so both splits share the
    same cluster geometry and importance order."""
    full = generate_synthetic(train_size + test_size, num_features, class_separation, seed)
    train = Dataset(
        full.feature_names,
        full.rows[:train_size],
        full.labels[:train_size],
        full.importance_order,
    )
    test = Dataset(
        full.feature_names,
        full.rows[train_size:],
        full.labels[train_size:],
        full.importance_order,
    )
    return train, test
