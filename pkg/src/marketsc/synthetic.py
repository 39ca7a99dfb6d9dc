"""Synthetic markets and datasets.

"Scaled to [lo, hi]" always means affine min-max rescaling of the drawn
sample, so the endpoints are hit exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import Dataset, DemandProfile
from .errors import InputError

KINDS = (
    "beta_demand",
    "normal_demand",
    "gaussian_threshold",
    "two_feature",
    "budget_label_independent",
    "inverted_gap",
)


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str = "two_feature"
    m: int = 1000
    seed: int = 0
    mu: float = 1.0
    sigma: float = 0.15
    beta_a: float = 1.0
    beta_b: float = 1.0
    lo: float = 1.0
    hi: float = 10.0
    p1: float | None = None
    alpha: float | None = None
    b_min: float = 1.0
    b_max: float = 5.0
    b1: float = 1.0
    gap: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown scenario kind {self.kind!r}")
        if self.sigma <= 0 or self.beta_a <= 0 or self.beta_b <= 0:
            raise InputError("sigma and Beta shapes must be positive")
        if not self.lo < self.hi:
            raise InputError("need lo < hi")
        if self.p1 is not None and not 0 < self.p1 < 1:
            raise InputError("p1 must lie in (0, 1)")
        if self.m < 1:
            raise InputError("m must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


def minmax_scale(x, lo: float, hi: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.size == 1:
        return np.full_like(x, (lo + hi) / 2)
    span = x.max() - x.min()
    if span == 0:
        return np.full_like(x, (lo + hi) / 2)
    return lo + (x - x.min()) / span * (hi - lo)


def power_budgets(units, alpha: float) -> np.ndarray:
    """Budgets ``u ** -alpha``: larger demand, smaller budget."""
    u = np.asarray(units, dtype=float)
    if (u <= 0).any():
        raise InputError("units must be positive")
    return u ** (-float(alpha))


def _with_budgets(u: np.ndarray, alpha: float | None) -> DemandProfile:
    b = np.ones_like(u) if alpha is None else power_budgets(u, alpha)
    return DemandProfile.from_pairs(u, b)


def beta_demand(a: float, b: float, lo: float = 1.0, hi: float = 10.0, m: int = 1000,
                alpha: float | None = None, seed: int = 0) -> DemandProfile:
    """Units drawn from Beta(a, b) and min-max scaled to ``[lo, hi]``.

    Budgets are 1, or ``u ** -alpha`` when ``alpha`` is given. With ``m = 1``
    the single unit is mapped to the middle of the interval.
    """
    rng = np.random.default_rng(seed)
    u = minmax_scale(rng.beta(a, b, size=m), lo, hi)
    if lo <= 0:
        u = u[u > 0]
    return _with_budgets(u, alpha)


def normal_demand(lo: float = 1.0, hi: float = 2.0, m: int = 1000,
                  alpha: float | None = None, seed: int = 0) -> DemandProfile:
    rng = np.random.default_rng(seed)
    return _with_budgets(minmax_scale(rng.standard_normal(m), lo, hi), alpha)


def adversarial_equal_revenue(m: int) -> DemandProfile:
    """Units 1, 2, then each twice the sum of all before it; unit budgets.

    Every candidate price except the first earns the same revenue.
    """
    if m < 3:
        raise InputError("construction needs m >= 3")
    u = [1.0, 2.0]
    while len(u) < m:
        u.append(2.0 * sum(u))
    return DemandProfile.from_pairs(np.array(u))


def _class_counts(m: int, p1: float) -> tuple[int, int]:
    n1 = int(round(m * p1))
    n1 = min(max(n1, 1), m - 1) if m > 1 else n1
    return m - n1, n1


def gaussian_threshold_scenario(spec: ScenarioSpec) -> tuple[Dataset, str]:
    """1-D distances: class 0 scaled into [-1, 0), class 1 into (0, 1].

    Budgets rise linearly in ``z`` from ``b_min`` at -1 to ``b_max`` at 1;
    ``b_max == b_min`` gives uniform budgets.
    """
    rng = np.random.default_rng(spec.seed)
    p1 = 0.5 if spec.p1 is None else spec.p1
    n0, n1 = _class_counts(spec.m, p1)
    eps = 1e-6
    z0 = minmax_scale(rng.normal(-spec.mu, spec.sigma, n0), -1.0, -eps)
    z1 = minmax_scale(rng.normal(spec.mu, spec.sigma, n1), eps, 1.0)
    z = np.concatenate([z0, z1])
    labels = np.r_[np.zeros(n0, dtype=int), np.ones(n1, dtype=int)]
    budgets = spec.b_min + (z + 1.0) / 2.0 * (spec.b_max - spec.b_min)
    desc = (f"gaussian threshold: n0={n0} n1={n1}, budgets linear in z "
            f"from {spec.b_min} to {spec.b_max}")
    return Dataset(z.reshape(-1, 1), budgets, labels), desc


def two_feature_scenario(spec: ScenarioSpec) -> Dataset:
    """x1 ~ N(mu * (2y - 1), sigma) separates classes, x2 ~ N(0, sigma) does not; b = 1 + 4y."""
    rng = np.random.default_rng(spec.seed)
    p1 = 0.25 if spec.p1 is None else spec.p1
    labels = (rng.random(spec.m) < p1).astype(int)
    x1 = rng.normal(spec.mu * (2 * labels - 1), spec.sigma)
    x2 = rng.normal(0.0, spec.sigma, spec.m)
    return Dataset(np.column_stack([x1, x2]), 1.0 + 4.0 * labels, labels)


def budget_label_independent_scenario(spec: ScenarioSpec) -> Dataset:
    """Budgets follow x1, labels follow x2, and x1 is independent of the label."""
    rng = np.random.default_rng(spec.seed)
    p1 = 0.25 if spec.p1 is None else spec.p1
    labels = (rng.random(spec.m) < p1).astype(int)
    x1 = rng.normal(0.0, 0.4, spec.m)
    x2 = rng.normal(2 * labels - 1, 0.3)
    budgets = np.maximum(0.1, 2.5 * x1 + rng.normal(0.0, 0.2, spec.m))
    return Dataset(np.column_stack([x1, x2]), budgets, labels)


def inverted_gap_scenario(spec: ScenarioSpec) -> Dataset:
    """1-D classes N(0, sigma) and N(gap, sigma); budgets ``b1 * y``.

    Negatives get zero budget and therefore never move.
    """
    rng = np.random.default_rng(spec.seed)
    p1 = 0.3 if spec.p1 is None else spec.p1
    n0, n1 = _class_counts(spec.m, p1)
    x = np.concatenate([rng.normal(0.0, spec.sigma, n0), rng.normal(spec.gap, spec.sigma, n1)])
    labels = np.r_[np.zeros(n0, dtype=int), np.ones(n1, dtype=int)]
    return Dataset(x.reshape(-1, 1), spec.b1 * labels, labels)


def generate(spec: ScenarioSpec):
    """Dispatch on ``spec.kind``; demand kinds return a DemandProfile, the rest a Dataset."""
    if spec.kind == "beta_demand":
        return beta_demand(spec.beta_a, spec.beta_b, spec.lo, spec.hi, spec.m, spec.alpha, spec.seed)
    if spec.kind == "normal_demand":
        return normal_demand(spec.lo, spec.hi, spec.m, spec.alpha, spec.seed)
    if spec.kind == "gaussian_threshold":
        return gaussian_threshold_scenario(spec)[0]
    if spec.kind == "two_feature":
        return two_feature_scenario(spec)
    if spec.kind == "budget_label_independent":
        return budget_label_independent_scenario(spec)
    return inverted_gap_scenario(spec)
