"""Exact revenue-maximizing market prices.

A user with demand ``u`` and budget ``b`` buys at scalar price ``rho`` iff
``rho * u <= b``, i.e. iff their normalized demand ``u / b`` is at most
``1 / rho``. Revenue ``rho * sum(u of buyers)`` rises linearly between the
candidate prices ``1 / ubar_i`` and drops right after each one, so the
optimum is always one of those candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DemandProfile
from .errors import DegenerateClassifierError

# Inclusive affordability is evaluated with a few ulps of slack so that the
# price setter, whose price is 1/ubar rounded, always counts as a buyer.
AFFORD_RTOL = 1e-12
# Candidates whose revenue is within this relative margin of the best are
# treated as tied; the tie goes to the highest price.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PriceQuote:
    rho: float
    setter_index: int | None
    revenue: float
    buyers: int

    def price_vector(self, w) -> np.ndarray:
        return price_vector(self.rho, w)


@dataclass(frozen=True)
class RevenueCurve:
    prices: np.ndarray
    revenues: np.ndarray
    origin: np.ndarray

    @property
    def candidates(self) -> list[tuple[float, float]]:
        return [(float(p), float(r)) for p, r in zip(self.prices, self.revenues)]

    def __len__(self) -> int:
        return len(self.prices)


@dataclass(frozen=True)
class _Sorted:
    nbar: np.ndarray
    cum_units: np.ndarray
    origin: np.ndarray


def _sorted(profile: DemandProfile) -> _Sorted:
    nbar = profile.normalized
    order = np.lexsort((profile.origin, nbar))
    return _Sorted(nbar[order], np.cumsum(profile.units[order]), profile.origin[order])


def _buyer_counts(nbar_sorted: np.ndarray, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore"):
        cutoff = (1.0 + AFFORD_RTOL) / rho
    return np.searchsorted(nbar_sorted, cutoff, side="right")


def _revenue_from_counts(s: _Sorted, rho, counts) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    sold = np.where(counts > 0, s.cum_units[np.maximum(counts - 1, 0)], 0.0)
    return rho * sold


def revenue_at(rho: float, profile: DemandProfile) -> float:
    """Total revenue ``rho * sum(u_j : u_j / b_j <= 1 / rho)``."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if len(profile) == 0:
        return 0.0
    s = _sorted(profile)
    k = _buyer_counts(s.nbar, rho)
    return float(_revenue_from_counts(s, rho, k))


def revenue_curve(profile: DemandProfile) -> RevenueCurve:
    """Revenue at every candidate price, in ascending order of normalized demand."""
    if len(profile) == 0:
        return RevenueCurve(np.empty(0), np.empty(0), np.empty(0, dtype=int))
    s = _sorted(profile)
    prices = 1.0 / s.nbar
    k = _buyer_counts(s.nbar, prices)
    return RevenueCurve(prices, _revenue_from_counts(s, prices, k), s.origin)


def exact_price(profile: DemandProfile) -> PriceQuote:
    """Revenue-maximizing scalar price of a demand profile.

    Sorted scan over candidates ``1 / ubar_(i)`` with cumulative units; ties
    in revenue keep the highest price, and users with equal ``ubar`` are
    ordered by origin index. An empty profile yields ``rho = 0``.
    """
    if len(profile) == 0:
        return PriceQuote(0.0, None, 0.0, 0)
    s = _sorted(profile)
    prices = 1.0 / s.nbar
    k = _buyer_counts(s.nbar, prices)
    revenues = _revenue_from_counts(s, prices, k)
    best = revenues.max()
    i = int(np.argmax(revenues >= best * (1.0 - TIE_RTOL)))
    return PriceQuote(float(prices[i]), int(s.origin[i]), float(revenues[i]), int(k[i]))


def price_vector(rho: float, w) -> np.ndarray:
    """Per-feature prices ``rho * w / ||w||``; moving distance ``u`` along ``w`` costs ``rho * u``."""
    w = np.asarray(w, dtype=float).reshape(-1)
    n = np.linalg.norm(w)
    if n == 0:
        raise DegenerateClassifierError("classifier has zero weight vector")
    return rho * w / n


def brute_force_price(profile: DemandProfile, grid: int = 100_000) -> PriceQuote:
    """Grid search oracle for :func:`exact_price`, intended for small profiles.

    Revenue is evaluated directly from the affordability predicate (no
    sorting or cumulative sums) on a log-spaced grid spanning the candidate
    range, merged with the candidates themselves.
    """
    if len(profile) == 0:
        return PriceQuote(0.0, None, 0.0, 0)
    u, b = profile.units, profile.budgets
    cands = b / u
    lo, hi = cands.min(), cands.max()
    prices = np.unique(np.concatenate([np.geomspace(lo / 2, hi * 2, grid), cands]))
    best_rev, best_rho, best_buy = -1.0, 0.0, None
    chunk = max(1, 2_000_000 // max(len(u), 1))
    for start in range(0, len(prices), chunk):
        p = prices[start:start + chunk, None]
        buys = p * u[None, :] <= b[None, :] * (1.0 + AFFORD_RTOL)
        rev = p[:, 0] * (buys * u[None, :]).sum(axis=1)
        j = int(np.argmax(rev))
        if rev[j] > best_rev:
            best_rev, best_rho, best_buy = float(rev[j]), float(p[j, 0]), buys[j]
    setter = None
    if best_buy is not None and best_buy.any():
        nbar = u / b
        masked = np.where(best_buy, nbar, -np.inf)
        setter = int(profile.origin[int(np.argmax(masked))])
    return PriceQuote(best_rho, setter, best_rev, int(best_buy.sum()))
