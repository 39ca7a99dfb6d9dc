"""Population revenue theory, price-setter diagnostics and parameter sweeps.

For a population with demand density ``f`` and unit budgets, posting the
price ``1 / u`` sells to everyone with demand at most ``u``, so the expected
revenue per user is

    r(u; f) = (1 / u) * integral_lo^u f(t) t dt.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, optimize, stats

from .core import Dataset, DemandProfile, LinearClassifier, demand_profile
from .errors import EmptyProfileError, InputError
from .evaluation import evaluate
from .pricing import exact_price
from .smooth import SmoothPriceConfig, smooth_price_arrays

FAMILIES = ("beta", "uniform", "normal", "mixture")

QUAD_RTOL = 1e-8


@dataclass(frozen=True)
class PdfSpec:
    """A demand density on ``[lo, hi]``.

    ``params`` by family:

    - ``beta``: ``(a, b)``, mapped affinely onto ``[lo, hi]``
    - ``uniform``: ``()``
    - ``normal``: ``(mu, sigma)``, truncated to ``[lo, hi]``
    - ``mixture``: ``(weight, mu1, sigma1, mu2, sigma2)``, each component truncated
    """

    family: str
    params: tuple = ()
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo < self.hi):
            raise InputError("support needs finite lo < hi")
        if self.lo < 0:
            raise InputError("demand support must be nonnegative")
        want = {"beta": 2, "uniform": 0, "normal": 2, "mixture": 5}[self.family]
        if len(self.params) != want:
            raise InputError(f"{self.family} takes {want} parameters")
        if self.family == "mixture" and not 0 <= self.params[0] <= 1:
            raise InputError("mixture weight must lie in [0, 1]")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        scales = {"beta": self.params, "normal": self.params[1:], "mixture": self.params[2::2]}
        if not all(v > 0 for v in scales.get(self.family, ())):
            raise InputError(f"{self.family} shape and scale parameters must be positive")

    @cached_property
    def _components(self):
        lo, hi = self.lo, self.hi
        if self.family == "beta":
            return [(1.0, stats.beta(*self.params, loc=lo, scale=hi - lo))]
        if self.family == "uniform":
            return [(1.0, stats.uniform(loc=lo, scale=hi - lo))]

        def tn(mu, sd):
            return stats.truncnorm((lo - mu) / sd, (hi - mu) / sd, loc=mu, scale=sd)

        if self.family == "normal":
            return [(1.0, tn(*self.params))]
        p, m1, s1, m2, s2 = self.params
        return [(p, tn(m1, s1)), (1.0 - p, tn(m2, s2))]

    def pdf(self, u):
        u = np.asarray(u, dtype=float)
        return sum(wt * d.pdf(u) for wt, d in self._components)

    def sample(self, m: int, rng: np.random.Generator) -> np.ndarray:
        comps = self._components
        if len(comps) == 1:
            return comps[0][1].rvs(size=m, random_state=rng)
        first = rng.random(m) < comps[0][0]
        out = np.empty(m)
        out[first] = comps[0][1].rvs(size=int(first.sum()), random_state=rng)
        out[~first] = comps[1][1].rvs(size=int((~first).sum()), random_state=rng)
        return out


def _quad(fn, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(fn, a, b, epsrel=QUAD_RTOL, epsabs=0.0, limit=200)
    return float(val)


def expected_revenue(pdf: PdfSpec, u: float) -> float:
    if not (pdf.lo <= u <= pdf.hi) or u <= 0:
        raise InputError(f"u={u} outside the support ({pdf.lo}, {pdf.hi}]")
    return _quad(lambda t: float(pdf.pdf(t)) * t, pdf.lo, u) / u


def _grid_revenue(pdf: PdfSpec, grid: np.ndarray, order: int = 16) -> np.ndarray:
    """``r`` at every grid point, cheaply; only used to locate the maximizer.

    Interior cells use fixed Gauss-Legendre; the two end cells, where Beta
    densities may be singular, use adaptive quadrature.
    """
    def mass(a, b):
        return _quad(lambda t: float(pdf.pdf(t)) * t, a, b)

    x, wq = np.polynomial.legendre.leggauss(order)
    a, b = grid[1:-2], grid[2:-1]
    half, mid = (b - a) / 2, (a + b) / 2
    t = mid[:, None] + half[:, None] * x[None, :]
    inner = (pdf.pdf(t) * t * wq[None, :]).sum(axis=1) * half
    pieces = np.concatenate([[mass(pdf.lo, grid[0]), mass(grid[0], grid[1])], inner,
                             [mass(grid[-2], grid[-1])]])
    return np.cumsum(pieces) / grid


def _d_sign_changes(pdf: PdfSpec, grid: np.ndarray) -> tuple[int, bool]:
    D = pdf.pdf(grid) * grid
    dD = np.diff(D)
    tol = 1e-10 * max(float(np.abs(D).max()), 1e-300)
    s = np.sign(np.where(np.abs(dD) <= tol, 0.0, dD))
    s = s[s != 0]
    changes = int(np.count_nonzero(s[1:] != s[:-1]))
    return changes, bool(s.size == 0 or s[0] > 0)


def expected_maximizer(pdf: PdfSpec, n_grid: int = 512) -> tuple[float, bool]:
    """Maximize ``r(u; f)`` over the support; returns ``(u*, unique)``.

    The grid pass locates the best bracket, golden-section search refines it.
    ``unique`` certifies that ``D(u) = f(u) u`` is increasing or unimodal on
    the grid: its finite differences change sign at most once, from + to -.
    """
    start = pdf.lo if pdf.lo > 0 else pdf.hi * 1e-9
    grid = np.linspace(start, pdf.hi, n_grid)
    r = _grid_revenue(pdf, grid)
    i = int(np.argmax(r))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]
    res = optimize.minimize_scalar(lambda x: -expected_revenue(pdf, x), bounds=(a, b),
                                   method="bounded", options={"xatol": 1e-10 * pdf.hi})
    best_u, best_r = float(grid[i]), float(r[i])
    if res.success and -res.fun > best_r:
        best_u, best_r = float(res.x), float(-res.fun)
    changes, rising = _d_sign_changes(pdf, grid)
    return best_u, changes == 0 or (changes == 1 and rising)


def price_setter_percentile(profile: DemandProfile) -> float:
    """Fraction of the profile whose normalized demand is at most the setter's."""
    if len(profile) == 0:
        raise EmptyProfileError("percentile of an empty profile is undefined")
    return exact_price(profile).buyers / len(profile)


def _mean_market_hinge(S: Dataset, h: LinearClassifier, rho: float) -> float:
    reach = S.budgets / rho if rho > 0 else np.zeros(len(S))
    margin = S.y * (h.scores(S.X) + reach * h.norm)
    return float(np.maximum(0.0, 1.0 - margin).mean())


def threshold_sweep(w, S: Dataset, tau_values, smooth: SmoothPriceConfig | None = None,
                    with_smooth: bool = True) -> list[dict]:
    """Equilibrate and evaluate ``h = (w, tau)`` for each bias in ``tau_values``.

    Each record holds the exact price, post-market metrics, the price setter's
    percentile and three losses: 0-1, market hinge at the exact price and
    market hinge at the smoothed price (skipped, as NaN, when ``with_smooth``
    is false; it costs O(n^2) memory). Without demand the price is 0 and both
    market hinges reduce to the plain hinge.
    """
    taus = list(tau_values)
    if not taus:
        raise InputError("tau_values is empty")
    w = np.asarray(w, dtype=float)
    smooth = smooth or SmoothPriceConfig()
    rows = []
    for tau in taus:
        h = LinearClassifier(w, float(tau))
        prof = demand_profile(h, S)
        quote = exact_price(prof)
        met = evaluate(h, S, quote.rho)
        exact_loss = _mean_market_hinge(S, h, quote.rho)
        smooth_loss = float("nan")
        if with_smooth:
            rho_s = smooth_price_arrays(prof.units, prof.budgets, smooth).rho_smooth if len(prof) else 0.0
            smooth_loss = _mean_market_hinge(S, h, rho_s)
        rows.append({
            "tau": float(tau),
            "rho": quote.rho,
            "accuracy": met.accuracy,
            "crossed_pos_ratio": met.crossed_pos_ratio,
            "crossed_neg_ratio": met.crossed_neg_ratio,
            "setter_percentile": quote.buyers / len(prof) if len(prof) else float("nan"),
            "zero_one": 1.0 - met.accuracy,
            "m_hinge_exact": exact_loss,
            "m_hinge_smooth": smooth_loss,
        })
    return rows


def sensitivity_add_point(profile: DemandProfile, u0_values, b0: float = 1.0) -> list[dict]:
    """Exact price after adding one user ``(u0, b0)`` to ``profile``, per ``u0``."""
    if len(profile) == 0:
        raise EmptyProfileError("base profile is empty")
    if b0 <= 0:
        raise InputError("b0 must be positive")
    new_origin = int(profile.origin.max()) + 1
    rows = []
    for u0 in u0_values:
        aug = DemandProfile(
            np.append(profile.units, u0), np.append(profile.budgets, b0),
            np.append(profile.origin, new_origin), profile.source_size + 1,
        )
        q = exact_price(aug)
        rows.append({"u0": float(u0), "rho": q.rho, "setter_index": q.setter_index,
                     "new_point_sets_price": q.setter_index == new_origin})
    return rows


def convergence_with_m(pdf: PdfSpec, m_values, trials: int = 20, seed: int = 0) -> list[dict]:
    """Monte-Carlo spread of the exact price and of revenue per user as ``m`` grows.

    Budgets are 1. Every (m, trial) pair draws from its own child seed.
    """
    if trials < 1:
        raise InputError("trials must be positive")
    root = np.random.SeedSequence(seed)
    rows = []
    for m, ss in zip(m_values, root.spawn(len(m_values))):
        rhos, revs = [], []
        for child in ss.spawn(trials):
            u = pdf.sample(int(m), np.random.default_rng(child))
            u = u[u > 0]
            q = exact_price(DemandProfile.from_pairs(u))
            rhos.append(q.rho)
            revs.append(q.revenue / int(m))
        rows.append({
            "m": int(m),
            "rho_mean": float(np.mean(rhos)),
            "rho_sd": float(np.std(rhos, ddof=1)) if trials > 1 else 0.0,
            "revenue_mean": float(np.mean(revs)),
            "revenue_sd": float(np.std(revs, ddof=1)) if trials > 1 else 0.0,
        })
    return rows
