"""Differentiable surrogate for the exact market price.

The exact algorithm sorts normalized demand, accumulates units and takes an
argmax over candidate revenues. Here the sort becomes a SoftSort matrix and
the argmax a softmax, so the price is a smooth function of every ``u_i`` and
``b_i``. Derivatives are propagated by hand through that fixed graph.

Forward pass, for ``n`` demand points::

    ubar  = u / b
    gamma = min(ubar);  v = ubar / gamma          # smallest entry is 1
    P     = softsort(v, T_sort)                   # n x n, row-stochastic
    z     = 1 / (P v)                             # normalized candidate prices
    c     = cumsum(P u)                           # units sold per candidate
    share = z * c / (gamma * sum(b))              # revenue / total budget
    q     = softmax(share / T_max)
    rho   = max(q . z / gamma, rho_floor)

Revenue enters the softmax as a share of the total budget, which makes the
price obey ``rho(a u, b) = rho(u, b) / a`` and keeps the softmax temperature
meaningful across batches and budget scales.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DemandProfile
from .errors import EmptyProfileError, InputError


@dataclass(frozen=True)
class SmoothPriceConfig:
    temp_softsort: float = 1e-3
    temp_softmax: float = 1e-2
    rho_floor: float = 1e-12

    def __post_init__(self):
        if self.temp_softsort <= 0 or self.temp_softmax <= 0:
            raise InputError("temperatures must be positive")
        if self.rho_floor <= 0:
            raise InputError("rho_floor must be positive")


@dataclass(frozen=True)
class SmoothPriceResult:
    rho_smooth: float
    d_rho_d_units: np.ndarray | None = None
    d_rho_d_budgets: np.ndarray | None = None
    clamped: bool = False


def _softmax(a: np.ndarray, axis: int = -1) -> np.ndarray:
    a = a - a.max(axis=axis, keepdims=True)
    e = np.exp(a)
    return e / e.sum(axis=axis, keepdims=True)


def soft_sort(values, temp: float) -> np.ndarray:
    """SoftSort relaxation of the ascending sort permutation.

    Row ``i`` is ``softmax(-|sort(v)_i - v_j| / temp)`` over ``j``; applying
    the matrix to ``v`` gives a softly sorted vector.
    """
    if temp <= 0:
        raise InputError("temperature must be positive")
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size == 0:
        raise InputError("soft_sort needs at least one value")
    s = np.sort(v)
    return _softmax(-np.abs(s[:, None] - v[None, :]) / temp, axis=1)


def _smooth(u: np.ndarray, b: np.ndarray, cfg: SmoothPriceConfig, grad: bool):
    n = u.shape[0]
    if n == 0:
        raise EmptyProfileError("smooth price of an empty market is undefined")
    nbar = u / b
    k = int(np.argmin(nbar))
    gamma = nbar[k]
    v = nbar / gamma
    perm = np.argsort(v, kind="stable")
    s = v[perm]
    diff = s[:, None] - v[None, :]
    P = _softmax(-np.abs(diff) / cfg.temp_softsort, axis=1)
    uP = P @ u
    vP = P @ v
    z = 1.0 / vP
    c = np.cumsum(uP)
    B = b.sum()
    share = z * c / (gamma * B)
    q = _softmax(share / cfg.temp_softmax)
    S = float(q @ z)
    rho = S / gamma
    clamped = rho < cfg.rho_floor
    if clamped:
        rho = cfg.rho_floor
    if not grad:
        return SmoothPriceResult(rho, clamped=clamped)
    if clamped:
        return SmoothPriceResult(rho, np.zeros(n), np.zeros(n), True)

    # reverse pass, seeded with d rho = 1
    g_gamma = -S / gamma**2
    g_z = q / gamma
    g_q = z / gamma
    g_share = q * (g_q - q @ g_q) / cfg.temp_softmax
    g_z = g_z + g_share * c / (gamma * B)
    g_c = g_share * z / (gamma * B)
    g_gamma += -float(g_share @ share) / gamma
    g_B = -float(g_share @ share) / B
    g_uP = np.cumsum(g_c[::-1])[::-1]
    g_vP = -g_z / vP**2
    g_u = P.T @ g_uP
    g_v = P.T @ g_vP
    g_P = np.outer(g_uP, u) + np.outer(g_vP, v)
    g_A = P * (g_P - (P * g_P).sum(axis=1, keepdims=True))
    sgn = np.sign(diff) / cfg.temp_softsort
    g_s = -(g_A * sgn).sum(axis=1)
    g_v = g_v + (g_A * sgn).sum(axis=0)
    np.add.at(g_v, perm, g_s)
    g_nbar = g_v / gamma
    g_gamma += -float(g_v @ nbar) / gamma**2
    g_nbar[k] += g_gamma
    g_u = g_u + g_nbar / b
    g_b = -g_nbar * u / b**2 + g_B
    return SmoothPriceResult(rho, g_u, g_b, False)


def smooth_price_arrays(units, budgets, cfg: SmoothPriceConfig | None = None, grad: bool = False):
    cfg = cfg or SmoothPriceConfig()
    u = np.asarray(units, dtype=float).reshape(-1)
    b = np.asarray(budgets, dtype=float).reshape(-1)
    return _smooth(u, b, cfg, grad)


def smooth_price(profile: DemandProfile, cfg: SmoothPriceConfig | None = None) -> SmoothPriceResult:
    """Smoothed market price of a non-empty profile (value only)."""
    return smooth_price_arrays(profile.units, profile.budgets, cfg, grad=False)


def smooth_price_gradient(profile: DemandProfile, cfg: SmoothPriceConfig | None = None) -> SmoothPriceResult:
    """Smoothed price plus its partial derivatives w.r.t. every unit and budget."""
    return smooth_price_arrays(profile.units, profile.budgets, cfg, grad=True)
