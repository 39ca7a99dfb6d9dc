"""CSV datasets.

Format: UTF-8, comma separated, LF line endings, header
``feature_0,...,feature_{d-1},budget,label``. Rows are numbered from 1 (the
first line after the header) in error messages.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .core import Dataset
from .errors import InputError, ParseError, RecordInvariantError, SchemaError


def _check_header(header: list[str]) -> int:
    missing = [c for c in ("budget", "label") if c not in header]
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}")
    if len(header) < 3:
        raise SchemaError("header needs at least one feature, budget and label")
    *feats, budget, label = header
    if (budget, label) != ("budget", "label"):
        raise SchemaError("budget and label must be the last two columns")
    want = [f"feature_{i}" for i in range(len(feats))]
    if feats != want:
        raise SchemaError(f"feature columns must be {','.join(want)}")
    return len(feats)


def load_dataset(path, strict: bool = True) -> Dataset:
    """Read and validate a dataset file.

    ``strict`` enforces nonnegative features and positive budgets. Turn it
    off to reload synthetic data, which may hold negative features or zero
    budgets.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        d = _check_header([c.strip() for c in header])
        X, budgets, labels = [], [], []
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != d + 2:
                raise ParseError(row_no, f"expected {d + 2} fields, got {len(row)}")
            try:
                vals = [float(v) for v in row[:-1]]
            except ValueError as exc:
                raise ParseError(row_no, str(exc)) from None
            if not all(math.isfinite(v) for v in vals):
                raise RecordInvariantError(row_no, "non-finite value")
            try:
                label = int(row[-1])
            except ValueError:
                raise ParseError(row_no, f"label {row[-1]!r} is not an integer") from None
            if label not in (0, 1):
                raise RecordInvariantError(row_no, f"label must be 0 or 1, got {label}")
            if strict:
                if any(v < 0 for v in vals[:-1]):
                    raise RecordInvariantError(row_no, "features must be nonnegative")
                if vals[-1] <= 0:
                    raise RecordInvariantError(row_no, "budget must be positive")
            elif vals[-1] < 0:
                raise RecordInvariantError(row_no, "budget must be nonnegative")
            X.append(vals[:-1])
            budgets.append(vals[-1])
            labels.append(label)
    X = np.asarray(X, dtype=float).reshape(len(labels), d)
    return Dataset(X, np.asarray(budgets, dtype=float), np.asarray(labels, dtype=int))


def write_dataset(S: Dataset, path) -> Path:
    """Write ``S`` with shortest round-trip float formatting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"feature_{i}" for i in range(S.dim)] + ["budget", "label"])
        for x, b, y in zip(S.X, S.budgets, S.labels):
            w.writerow([repr(float(v)) for v in x] + [repr(float(b)), int(y)])
    return path


def rescale_budgets(S: Dataset, alpha: float) -> Dataset:
    """Affine map of budgets onto ``[1, 2 ** alpha]``; equal budgets all become 1."""
    if alpha < 0:
        raise InputError("alpha must be nonnegative")
    b = S.budgets
    lo, hi = float(b.min()), float(b.max())
    if hi == lo:
        return S.with_budgets(np.ones_like(b))
    top = 2.0 ** alpha
    out = 1.0 + (b - lo) / (hi - lo) * (top - 1.0)
    out[b == lo], out[b == hi] = 1.0, top
    return S.with_budgets(out)
