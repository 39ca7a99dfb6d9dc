"""Market-aware training of linear classifiers.

The market hinge ``max(0, 1 - y (w.x + tau + (b / rho) ||w||))`` credits each
user with the distance ``b / rho`` they can afford to travel. During training
``rho`` is the smoothed price of the mini-batch's own demand, so gradients
flow through the market as well as through the margins.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Dataset, LinearClassifier, demand_profile
from .evaluation import evaluate, long_term_price
from .pricing import exact_price, price_vector
from .smooth import SmoothPriceConfig, smooth_price_arrays

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 500
    epochs: int = 100
    lambda_reg: float = 0.1
    smooth: SmoothPriceConfig = field(default_factory=SmoothPriceConfig)
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        if self.batch_size < 2:
            raise ValueError("batch_size must be at least 2")
        if self.learning_rate <= 0 or self.lambda_reg < 0 or self.epochs < 0:
            raise ValueError("invalid optimizer settings")


@dataclass
class ModelState:
    params: np.ndarray  # [w_1..w_d, tau]
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    history: list = field(default_factory=list)

    @classmethod
    def initial(cls, w, tau: float) -> "ModelState":
        p = np.append(np.asarray(w, dtype=float), float(tau))
        return cls(p, np.zeros_like(p), np.zeros_like(p))

    @property
    def classifier(self) -> LinearClassifier:
        return LinearClassifier(self.params[:-1].copy(), float(self.params[-1]))

    def copy(self) -> "ModelState":
        return ModelState(self.params.copy(), self.m.copy(), self.v.copy(), self.step, list(self.history))


@dataclass
class ObjectiveInfo:
    rho: float
    fallback: bool
    clamped: bool
    n_demand: int


def hinge(x, y, h: LinearClassifier) -> float:
    return max(0.0, 1.0 - y * (float(h.w @ np.asarray(x, dtype=float)) + h.tau))


def s_hinge(x, y, h: LinearClassifier) -> float:
    """Strategic hinge for unit-budget 2-norm costs: every user travels up to 2."""
    return max(0.0, 1.0 - y * (float(h.w @ np.asarray(x, dtype=float)) + h.tau + 2.0 * h.norm))


def m_hinge(x, y, b, h: LinearClassifier, rho: float, rho_floor: float = 1e-12) -> float:
    if rho < rho_floor:
        log.debug("m_hinge: rho %.3g below floor, clamped", rho)
        rho = rho_floor
    score = float(h.w @ np.asarray(x, dtype=float)) + h.tau + (b / rho) * h.norm
    return max(0.0, 1.0 - y * score)


def objective(batch: Dataset, h: LinearClassifier, cfg: TrainConfig, return_info: bool = False):
    """Mean market hinge at the batch's smoothed price plus ``lambda ||w||^2``.

    Returns ``(loss, grad)`` with ``grad`` laid out as ``[dL/dw..., dL/dtau]``.
    A batch with no demand has no price; its affordable-distance term is
    dropped, which reduces the loss to the plain hinge.
    """
    X, y, b = batch.X, batch.y.astype(float), batch.budgets
    n, d = X.shape
    w, tau = h.w, h.tau
    nw = float(np.linalg.norm(w))
    s = X @ w + tau
    reg = cfg.lambda_reg * nw**2
    g_w = 2.0 * cfg.lambda_reg * w
    g_tau = 0.0

    u = np.maximum(0.0, -s / nw) if nw > 0 else np.zeros(n)
    prof = np.flatnonzero((u > 0) & (b > 0))
    fallback = prof.size == 0
    if fallback:
        rho, clamped = float("nan"), False
        reach = np.zeros(n)
    else:
        res = smooth_price_arrays(u[prof], b[prof], cfg.smooth, grad=True)
        rho, clamped = res.rho_smooth, res.clamped
        reach = b / rho

    margin = y * (s + reach * nw)
    hl = np.maximum(0.0, 1.0 - margin)
    loss = float(hl.mean()) + reg
    active = hl > 0
    coef = -(y * active) / n  # dL/d(score)

    g_w = g_w + X.T @ coef
    g_tau += float(coef.sum())
    if not fallback and nw > 0:
        unit = w / nw
        # d(reach_i * ||w||) = reach_i * d||w|| - b_i ||w|| / rho^2 * d rho
        g_w = g_w + float(coef @ reach) * unit
        g_rho = -float(coef @ (b * nw)) / rho**2
        if g_rho != 0.0 and not clamped:
            gu = res.d_rho_d_units
            xp, sp, up = X[prof], s[prof], u[prof]
            # u_j = -s_j / ||w||  ->  du/dw = -x/||w|| - u w / ||w||^2,  du/dtau = -1/||w||
            drho_dw = -(xp.T @ gu) / nw - float(gu @ up) * w / nw**2
            drho_dtau = -float(gu.sum()) / nw
            g_w = g_w + g_rho * drho_dw
            g_tau += g_rho * drho_dtau
    grad = np.append(g_w, g_tau)
    if return_info:
        return loss, grad, ObjectiveInfo(rho, fallback, clamped, int(prof.size))
    return loss, grad


def plain_objective(batch: Dataset, h: LinearClassifier, lambda_reg: float):
    """Mean standard hinge plus ``lambda ||w||^2`` and its gradient."""
    y = batch.y.astype(float)
    margin = y * (batch.X @ h.w + h.tau)
    active = margin < 1.0
    n = len(batch)
    coef = -(y * active) / n
    loss = float(np.maximum(0.0, 1.0 - margin).mean() + lambda_reg * h.w @ h.w)
    grad = np.append(batch.X.T @ coef + 2.0 * lambda_reg * h.w, coef.sum())
    return loss, grad


def adam_step(state: ModelState, gradient, cfg: TrainConfig) -> ModelState:
    g = np.asarray(gradient, dtype=float)
    if g.shape != state.params.shape:
        raise ValueError("gradient shape does not match parameters")
    t = state.step + 1
    m = cfg.adam_beta1 * state.m + (1 - cfg.adam_beta1) * g
    v = cfg.adam_beta2 * state.v + (1 - cfg.adam_beta2) * g * g
    m_hat = m / (1 - cfg.adam_beta1**t)
    v_hat = v / (1 - cfg.adam_beta2**t)
    params = state.params - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_epsilon)
    return ModelState(params, m, v, t, state.history)


def _batches(n: int, batch_size: int, rng: np.random.Generator):
    perm = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield perm[start:start + batch_size]


def train_naive(train: Dataset, cfg: TrainConfig) -> ModelState:
    """Standard hinge + L2 classifier, blind to budgets and markets."""
    rng = np.random.default_rng(cfg.seed)
    state = ModelState.initial(np.zeros(train.dim), 0.0)
    for epoch in range(cfg.epochs):
        losses = []
        for idx in _batches(len(train), cfg.batch_size, rng):
            loss, grad = plain_objective(train.subset(idx), state.classifier, cfg.lambda_reg)
            state = adam_step(state, grad, cfg)
            losses.append(loss)
        state.history.append({"epoch": epoch + 1, "loss": float(np.mean(losses))})
    return state


def _val_long_accuracy(h: LinearClassifier, val: Dataset) -> float:
    if h.norm == 0:
        return float("nan")
    return evaluate(h, val, long_term_price(h, val)).accuracy


def train_masc(train: Dataset, val: Dataset, cfg: TrainConfig, init: ModelState | None = None) -> ModelState:
    """Market-aware training; returns the state with the best long-term validation accuracy.

    Starts from the naive model (trained here unless ``init`` is given).
    Epoch 0 in the history is the initialization itself.
    """
    if init is None:
        init = train_naive(train, cfg)
    state = ModelState.initial(init.params[:-1], init.params[-1])
    rng = np.random.default_rng([cfg.seed, 1])
    acc0 = _val_long_accuracy(state.classifier, val)
    state.history.append({"epoch": 0, "loss": None, "rho": None, "val_accuracy": acc0, "fallbacks": 0})
    best, best_acc = state.copy(), acc0
    for epoch in range(1, cfg.epochs + 1):
        losses, rhos, fallbacks = [], [], 0
        for idx in _batches(len(train), cfg.batch_size, rng):
            loss, grad, info = objective(train.subset(idx), state.classifier, cfg, return_info=True)
            if not np.all(np.isfinite(grad)):
                log.warning("non-finite gradient at epoch %d; batch skipped", epoch)
                continue
            state = adam_step(state, grad, cfg)
            losses.append(loss)
            fallbacks += info.fallback
            if not info.fallback:
                rhos.append(info.rho)
        acc = _val_long_accuracy(state.classifier, val)
        state.history.append({
            "epoch": epoch,
            "loss": float(np.mean(losses)) if losses else None,
            "rho": float(np.mean(rhos)) if rhos else None,
            "val_accuracy": acc,
            "fallbacks": fallbacks,
        })
        if acc > best_acc:
            best, best_acc = state.copy(), acc
    best.history = state.history
    return best


def default_tau_grid(w, X, n: int = 64) -> np.ndarray:
    """Biases whose thresholds span the score range widened by one IQR per side."""
    proj = np.asarray(X, dtype=float) @ np.asarray(w, dtype=float)
    q1, q3 = np.percentile(proj, [25, 75])
    iqr = q3 - q1
    return -np.linspace(proj.min() - iqr, proj.max() + iqr, n)


@dataclass
class StratResult:
    state: ModelState
    rho_train: float
    val_short_accuracy: float


def train_strat(train: Dataset, val: Dataset, cfg: TrainConfig, tau_grid=None,
                naive: ModelState | None = None) -> StratResult:
    """Fixed-price strategic baseline.

    Computes the exact price under the naive model on ``train``, sets ``w`` to
    that price vector and picks the bias maximizing validation accuracy with
    the price held fixed. ``tau_grid`` is expressed for the new ``w``.
    """
    if naive is None:
        naive = train_naive(train, cfg)
    h0 = naive.classifier
    rho = exact_price(demand_profile(h0, train)).rho if h0.norm > 0 else 0.0
    if h0.norm == 0:
        w = np.ones(train.dim) / np.sqrt(train.dim)
        scale = 1.0
    elif rho > 0:
        w = price_vector(rho, h0.w)
        scale = rho / h0.norm
    else:
        w = h0.direction()
        scale = 1.0 / h0.norm
    grid = default_tau_grid(w, train.X) if tau_grid is None else np.asarray(tau_grid, dtype=float)
    grid = np.unique(np.append(grid, h0.tau * scale))
    best_tau, best_acc = None, -1.0
    for tau in grid:
        acc = evaluate(LinearClassifier(w, tau), val, rho).accuracy
        if acc > best_acc:
            best_tau, best_acc = float(tau), acc
    state = ModelState.initial(w, best_tau)
    state.history = [{"rho_train": rho, "val_short_accuracy": best_acc}]
    return StratResult(state, rho, best_acc)
