"""Domain types and demand extraction.

A classifier ``h(x) = sign(w.x + tau)`` creates demand: every user on the
negative side needs ``u = -(w.x + tau) / ||w||`` units of movement along
``w / ||w||`` to reach the boundary. Pricing only ever sees the resulting
one-dimensional profile of ``(u, b)`` pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DegenerateClassifierError,
    DimensionMismatchError,
    InputError,
    RecordInvariantError,
    UndefinedInequalityError,
)


@dataclass(frozen=True)
class UserRecord:
    features: np.ndarray
    budget: float
    label: int

    @property
    def signed_label(self) -> int:
        return 2 * self.label - 1


@dataclass(frozen=True)
class LinearClassifier:
    w: np.ndarray
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float).reshape(-1))
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.w))

    def scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"expected features of dimension {self.dim}, got shape {X.shape}"
            )
        return X @ self.w + self.tau

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Vectorized predictions in {-1, +1}; boundary points are positive."""
        return np.where(self.scores(X) >= 0, 1, -1)

    def direction(self) -> np.ndarray:
        n = self.norm
        if n == 0:
            raise DegenerateClassifierError("classifier has zero weight vector")
        return self.w / n


@dataclass
class Dataset:
    """Users stored column-wise: features ``X`` (m x d), ``budgets`` and 0/1 ``labels``.

    Construction checks shapes and label values only. The tangibility and
    positive-budget rules are enforced by :meth:`validate`, which file
    ingestion calls; synthetic scenarios keep their centered
    coordinates (a translation that linear classifiers absorb into tau).
    """

    X: np.ndarray
    budgets: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim == 1:
            self.X = self.X.reshape(-1, 1)
        self.budgets = np.asarray(self.budgets, dtype=float).reshape(-1)
        self.labels = np.asarray(self.labels).astype(int).reshape(-1)
        m = self.X.shape[0]
        if self.budgets.shape[0] != m or self.labels.shape[0] != m:
            raise DimensionMismatchError(
                f"inconsistent lengths: X has {m} rows, budgets {self.budgets.shape[0]}, "
                f"labels {self.labels.shape[0]}"
            )
        if m and not np.isin(self.labels, (0, 1)).all():
            raise InputError("labels must be 0 or 1")

    @classmethod
    def from_records(cls, records: Sequence[UserRecord]) -> "Dataset":
        if not records:
            raise InputError("cannot infer dimension from an empty record list")
        X = np.stack([np.asarray(r.features, dtype=float) for r in records])
        return cls(X, [r.budget for r in records], [r.label for r in records])

    def __len__(self) -> int:
        return self.X.shape[0]

    def __iter__(self) -> Iterator[UserRecord]:
        for i in range(len(self)):
            yield UserRecord(self.X[i].copy(), float(self.budgets[i]), int(self.labels[i]))

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def y(self) -> np.ndarray:
        """Labels mapped to {-1, +1}."""
        return 2 * self.labels - 1

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.X[idx], self.budgets[idx], self.labels[idx])

    def with_budgets(self, budgets) -> "Dataset":
        return Dataset(self.X.copy(), budgets, self.labels.copy())

    def validate(self, strict: bool = True) -> None:
        """Check record invariants, raising with the offending row index.

        ``strict`` requires nonnegative features and positive budgets;
        otherwise only finiteness and ``b >= 0`` are required.
        """
        bad = ~np.isfinite(self.X).all(axis=1) | ~np.isfinite(self.budgets)
        if bad.any():
            raise RecordInvariantError(int(np.argmax(bad)), "non-finite value")
        if strict:
            neg = (self.X < 0).any(axis=1)
            if neg.any():
                raise RecordInvariantError(int(np.argmax(neg)), "negative feature value")
            nonpos = self.budgets <= 0
            if nonpos.any():
                raise RecordInvariantError(int(np.argmax(nonpos)), "budget must be > 0")
        else:
            neg = self.budgets < 0
            if neg.any():
                raise RecordInvariantError(int(np.argmax(neg)), "budget must be >= 0")


@dataclass(frozen=True)
class DemandPoint:
    units: float
    budget: float
    origin_index: int

    @property
    def normalized(self) -> float:
        return self.units / self.budget


@dataclass
class DemandProfile:
    """Demand of the users who want to buy: units ``u > 0`` and budgets ``b > 0``."""

    units: np.ndarray
    budgets: np.ndarray
    origin: np.ndarray
    source_size: int = field(default=-1)

    def __post_init__(self):
        self.units = np.asarray(self.units, dtype=float).reshape(-1)
        self.budgets = np.asarray(self.budgets, dtype=float).reshape(-1)
        self.origin = np.asarray(self.origin, dtype=int).reshape(-1)
        if not (self.units.shape == self.budgets.shape == self.origin.shape):
            raise DimensionMismatchError("units, budgets and origin must have equal length")
        if (self.units <= 0).any() or (self.budgets <= 0).any():
            raise InputError("demand points need units > 0 and budgets > 0")
        if self.source_size < 0:
            self.source_size = len(self.units)

    @classmethod
    def from_pairs(cls, units, budgets=None) -> "DemandProfile":
        units = np.asarray(units, dtype=float).reshape(-1)
        budgets = np.ones_like(units) if budgets is None else np.broadcast_to(
            np.asarray(budgets, dtype=float), units.shape
        )
        return cls(units, budgets, np.arange(len(units)))

    def __len__(self) -> int:
        return len(self.units)

    @property
    def normalized(self) -> np.ndarray:
        return self.units / self.budgets

    @property
    def points(self) -> list[DemandPoint]:
        return [
            DemandPoint(float(u), float(b), int(i))
            for u, b, i in zip(self.units, self.budgets, self.origin)
        ]

    def scaled(self, unit_scale: float = 1.0, budget_scale: float = 1.0) -> "DemandProfile":
        return DemandProfile(
            self.units * unit_scale, self.budgets * budget_scale, self.origin.copy(), self.source_size
        )

    def take(self, idx) -> "DemandProfile":
        idx = np.asarray(idx, dtype=int)
        return DemandProfile(self.units[idx], self.budgets[idx], self.origin[idx], self.source_size)


def predict(h: LinearClassifier, x) -> int:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != h.dim:
        raise DimensionMismatchError(f"feature dimension {x.shape[0]} != classifier dimension {h.dim}")
    return 1 if float(h.w @ x) + h.tau >= 0 else -1


def demand_units(h: LinearClassifier, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != h.dim:
        raise DimensionMismatchError(f"feature dimension {x.shape[0]} != classifier dimension {h.dim}")
    n = h.norm
    if n == 0:
        raise DegenerateClassifierError("classifier has zero weight vector")
    return max(0.0, -(float(h.w @ x) + h.tau) / n)


def demand_all(h: LinearClassifier, X) -> np.ndarray:
    """Vectorized :func:`demand_units` over the rows of ``X``."""
    n = h.norm
    if n == 0:
        raise DegenerateClassifierError("classifier has zero weight vector")
    return np.maximum(0.0, -h.scores(X) / n)


def demand_profile(h: LinearClassifier, S: Dataset) -> DemandProfile:
    """Demand profile of ``S`` under ``h``.

    Users with ``u = 0`` are dropped. Users with a zero budget (admitted by
    some synthetic scenarios) can never buy at a positive price and are
    dropped as well; ``source_size`` still counts everyone.
    """
    if len(S) == 0:
        return DemandProfile(np.empty(0), np.empty(0), np.empty(0, dtype=int), 0)
    u = demand_all(h, S.X)
    keep = (u > 0) & (S.budgets > 0)
    idx = np.flatnonzero(keep)
    return DemandProfile(u[idx], S.budgets[idx], idx, len(S))


def gini(budgets) -> float:
    """Population mean-absolute-difference Gini coefficient.

    ``sum_ij |b_i - b_j| / (2 n^2 mean(b))``, computed in O(n log n) from the
    sorted values.
    """
    b = np.sort(np.asarray(budgets, dtype=float).reshape(-1))
    n = b.shape[0]
    if n == 0:
        raise UndefinedInequalityError("gini of an empty list")
    if (b < 0).any():
        raise InputError("gini expects nonnegative values")
    total = b.sum()
    if total <= 0:
        raise UndefinedInequalityError("gini undefined when all values are zero")
    # sum_{i<j} (b_j - b_i) = sum_k (2k - n + 1) b_k over sorted b, 0-based k
    k = np.arange(n)
    pair_sum = np.sum((2 * k - n + 1) * b)
    return float(2 * pair_sum / (2 * n * total))
