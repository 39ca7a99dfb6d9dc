"""User best responses to posted market prices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, LinearClassifier, demand_all, demand_units, predict
from .errors import DegenerateClassifierError, DimensionMismatchError, InfeasibleResponseError
from .pricing import AFFORD_RTOL


@dataclass
class MarketOutcome:
    post_features: np.ndarray
    moved: np.ndarray
    crossed: np.ndarray
    spend: np.ndarray
    total_revenue: float
    rho: float
    mode: str = "directional"

    @property
    def n_movers(self) -> int:
        return int(self.moved.sum())


def least_cost_bundle(h: LinearClassifier, x, p) -> np.ndarray:
    """Cheapest nonnegative bundle that lifts ``x`` exactly onto the boundary.

    With ``z_i = delta_i * w_i`` the problem is to spread ``kappa = -(w.x + tau)``
    over features at cost ``p_i / w_i`` per unit of ``z``; all of it goes to the
    feature with the smallest ratio (lowest index on ties).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    p = np.asarray(p, dtype=float).reshape(-1)
    if x.shape[0] != h.dim or p.shape[0] != h.dim:
        raise DimensionMismatchError("x, p and w must share a dimension")
    kappa = -(float(h.w @ x) + h.tau)
    delta = np.zeros(h.dim)
    if kappa <= 0:
        return delta
    usable = np.flatnonzero(h.w > 0)
    if usable.size == 0:
        raise InfeasibleResponseError("no feature has positive weight")
    ratios = p[usable] / h.w[usable]
    j = usable[int(np.argmin(ratios))]
    delta[j] = kappa / h.w[j]
    return delta


def best_response(h: LinearClassifier, x, b: float, rho: float):
    """Return ``(x_new, moved, spend)`` for one user at scalar price ``rho``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if predict(h, x) == 1:
        return x.copy(), False, 0.0
    u = demand_units(h, x)
    cost = rho * u
    if b > 0 and cost <= b * (1.0 + AFFORD_RTOL):
        return x + u * h.direction(), True, float(cost)
    return x.copy(), False, 0.0


def _single_feature_outcome(h: LinearClassifier, S: Dataset, rho: float, feature: int) -> MarketOutcome:
    wj = h.w[feature]
    if wj <= 0:
        raise InfeasibleResponseError(f"feature {feature} has non-positive weight")
    scores = h.scores(S.X)
    u1 = np.maximum(0.0, -scores / wj)
    cost = rho * u1
    moved = (u1 > 0) & (S.budgets > 0) & (cost <= S.budgets * (1.0 + AFFORD_RTOL))
    post = S.X.copy()
    post[moved, feature] += u1[moved]
    spend = np.where(moved, cost, 0.0)
    return MarketOutcome(post, moved, moved.copy(), spend, float(spend.sum()), rho, f"single:{feature}")


def simulate_market(h: LinearClassifier, S: Dataset, rho: float, mode: str = "directional") -> MarketOutcome:
    """Apply best responses for every user at a shared price.

    ``mode="directional"`` moves users along ``w / ||w||`` with ``rho`` priced
    per Euclidean unit. ``mode="single:j"`` restricts purchases to feature
    ``j`` (which needs ``w_j > 0``), with ``rho`` priced per unit of that
    feature; this keeps every bundle nonnegative even when ``w`` has negative
    entries.
    """
    if mode.startswith("single:"):
        return _single_feature_outcome(h, S, rho, int(mode.split(":", 1)[1]))
    if mode != "directional":
        raise ValueError(f"unknown response mode {mode!r}")
    if h.norm == 0:
        raise DegenerateClassifierError("classifier has zero weight vector")
    u = demand_all(h, S.X)
    cost = rho * u
    moved = (u > 0) & (S.budgets > 0) & (cost <= S.budgets * (1.0 + AFFORD_RTOL))
    post = S.X.copy()
    post[moved] += u[moved, None] * h.direction()[None, :]
    spend = np.where(moved, cost, 0.0)
    return MarketOutcome(post, moved, moved.copy(), spend, float(spend.sum()), rho, mode)
