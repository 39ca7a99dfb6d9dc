"""Post-market metrics and the short-/long-term evaluation protocol."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import Dataset, LinearClassifier, demand_all, demand_profile
from .errors import InputError
from .pricing import exact_price
from .response import simulate_market


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    welfare: float
    burden: float
    crossed_pos_ratio: float
    crossed_neg_ratio: float
    rho_used: float
    n_movers: int

    def to_dict(self) -> dict:
        return asdict(self)


def _post_positive(h: LinearClassifier, S: Dataset, rho: float):
    pre = h.predict(S.X) == 1
    with np.errstate(invalid="ignore"):
        out = simulate_market(h, S, rho)
    # movers land exactly on the boundary, which counts as positive
    return pre, pre | out.moved, out


def welfare(h: LinearClassifier, S: Dataset, rho: float) -> float:
    """Budget-normalized utility minus spend, summed over all users."""
    B = float(S.budgets.sum())
    if B <= 0:
        raise InputError("welfare undefined: total budget is zero")
    _, post, out = _post_positive(h, S, rho)
    return float((np.sum(S.budgets * post) - np.sum(out.spend)) / B)


def social_burden(h: LinearClassifier, S: Dataset, rho: float) -> float:
    """Cost for all truly positive users to reach the boundary, over their total budget.

    Budgets do not cap this cost.
    """
    pos = S.labels == 1
    Bp = float(S.budgets[pos].sum())
    if Bp <= 0:
        raise InputError("social burden undefined: positives hold no budget")
    u = demand_all(h, S.X[pos])
    if rho == 0 or not (u > 0).any():
        return 0.0
    return float(np.sum(rho * u[u > 0]) / Bp)


def _ratio(num: int, den: int) -> float:
    return float(num) / den if den else 0.0


def evaluate(h: LinearClassifier, S: Dataset, rho: float) -> Metrics:
    if len(S) == 0:
        raise InputError("cannot evaluate on an empty dataset")
    pre, post, out = _post_positive(h, S, rho)
    y = S.y
    acc = float(np.mean(np.where(post, 1, -1) == y))
    try:
        wel = welfare(h, S, rho)
    except InputError:
        wel = float("nan")
    try:
        bur = social_burden(h, S, rho)
    except InputError:
        bur = float("nan")
    neg_side = ~pre
    pos_c = (y == 1) & neg_side
    neg_c = (y == -1) & neg_side
    return Metrics(
        accuracy=acc,
        welfare=wel,
        burden=bur,
        crossed_pos_ratio=_ratio(int(out.crossed[pos_c].sum()), int(pos_c.sum())),
        crossed_neg_ratio=_ratio(int(out.crossed[neg_c].sum()), int(neg_c.sum())),
        rho_used=float(rho),
        n_movers=out.n_movers,
    )


def long_term_price(h: LinearClassifier, S: Dataset) -> float:
    """Price re-equilibrated on the demand ``h`` induces on ``S``."""
    return exact_price(demand_profile(h, S)).rho


def evaluate_short_long(h: LinearClassifier, test: Dataset, rho_train: float) -> tuple[Metrics, Metrics]:
    """Metrics at the frozen train-time price and after prices re-equilibrate on ``test``."""
    return evaluate(h, test, rho_train), evaluate(h, test, long_term_price(h, test))


def plain_accuracy(h: LinearClassifier, S: Dataset) -> float:
    """Non-strategic accuracy: predictions on the unmodified features."""
    return float(np.mean(h.predict(S.X) == S.y))
