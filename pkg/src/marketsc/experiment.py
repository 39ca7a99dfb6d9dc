"""Experiment configs and the seeded train/evaluate pipeline.

A run writes three files into ``out_dir``:

- ``config.json``: the fully resolved config
- ``results.jsonl``: one JSON record per measurement
- ``aggregate.csv``: mean and standard error over splits (train and sweep only)

Nothing time- or host-dependent is written, so equal configs give
byte-identical reports.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .analysis import price_setter_percentile
from .core import Dataset, DemandProfile, LinearClassifier, demand_profile
from .dataio import load_dataset, rescale_budgets, write_dataset
from .errors import ConfigError, InputError
from .evaluation import evaluate, evaluate_short_long, long_term_price, plain_accuracy
from .learning import TrainConfig, train_masc, train_naive, train_strat
from .pricing import exact_price
from .response import simulate_market
from .smooth import SmoothPriceConfig, smooth_price
from .synthetic import ScenarioSpec, generate

log = logging.getLogger(__name__)

COMMANDS = ("price", "simulate", "train", "eval", "sweep", "synth")
METHODS = ("naive", "strat", "masc")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str = "train"
    dataset: str | None = None
    strict: bool = True
    scenario: dict | None = None
    train: dict = field(default_factory=dict)
    methods: tuple = METHODS
    classifier: dict | None = None
    rho: float | None = None
    alpha: float | None = None
    alphas: tuple | None = None
    split: tuple = (0.7, 0.1, 0.2)
    repetitions: int = 10
    seed: int = 0
    out_dir: str = "results"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        split = tuple(float(f) for f in self.split)
        if len(split) != 3 or min(split) <= 0 or abs(sum(split) - 1.0) > 1e-9:
            raise ConfigError("split needs three positive fractions summing to 1")
        object.__setattr__(self, "split", split)
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        methods = tuple(self.methods)
        bad = set(methods) - set(METHODS)
        if bad or not methods:
            raise ConfigError(f"methods must be a non-empty subset of {METHODS}")
        object.__setattr__(self, "methods", methods)
        if self.alphas is not None:
            object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.alpha is not None and self.alpha < 0:
            raise ConfigError("alpha must be nonnegative")
        if self.dataset is not None and self.scenario is not None:
            raise ConfigError("give either dataset or scenario, not both")
        self.train_config()  # fail early on bad training keys

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["train"] = asdict(self.train_config())
        return d

    def train_config(self) -> TrainConfig:
        t = dict(self.train)
        smooth = t.pop("smooth", {})
        names = {f.name for f in fields(TrainConfig)} - {"smooth"}
        unknown = sorted(set(t) - names)
        if unknown:
            raise ConfigError(f"unknown train key(s): {', '.join(unknown)}")
        try:
            sc = SmoothPriceConfig(**smooth)
            return TrainConfig(smooth=sc, **t)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad train settings: {exc}") from None


def _clean(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_clean(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _dumps(rec: dict) -> str:
    return json.dumps(_clean(rec), sort_keys=True, allow_nan=False)


def split_indices(n: int, fractions, rng: np.random.Generator):
    """Shuffle ``range(n)`` and cut it into train/val/test index arrays."""
    perm = rng.permutation(n)
    a = int(math.floor(fractions[0] * n))
    b = a + int(math.floor(fractions[1] * n))
    if a == 0 or b == a or b == n:
        raise InputError(f"{n} rows are too few for split {tuple(fractions)}")
    return perm[:a], perm[a:b], perm[b:]


def _load(cfg: ExperimentConfig):
    if cfg.dataset is not None:
        return load_dataset(cfg.dataset, strict=cfg.strict)
    if cfg.scenario is not None:
        try:
            spec = ScenarioSpec(**cfg.scenario)
        except TypeError as exc:
            raise ConfigError(f"bad scenario: {exc}") from None
        return generate(spec)
    raise ConfigError("config needs a dataset path or a scenario")


def _load_dataset(cfg: ExperimentConfig) -> Dataset:
    data = _load(cfg)
    if not isinstance(data, Dataset):
        raise ConfigError(f"command {cfg.command!r} needs a labeled dataset, not a demand profile")
    if cfg.alpha is not None:
        data = rescale_budgets(data, cfg.alpha)
    return data


def _classifier(cfg: ExperimentConfig, dim: int) -> LinearClassifier:
    if cfg.classifier is None:
        raise ConfigError(f"command {cfg.command!r} needs a classifier {{'w': [...], 'tau': ...}}")
    c = dict(cfg.classifier)
    if set(c) != {"w", "tau"}:
        raise ConfigError("classifier takes exactly the keys 'w' and 'tau'")
    h = LinearClassifier(np.asarray(c["w"], dtype=float), float(c["tau"]))
    if h.dim != dim:
        raise ConfigError(f"classifier has {h.dim} weights but the data has {dim} features")
    return h


def _metric_record(base: dict, method: str, horizon: str, metrics) -> dict:
    rec = dict(base, record="metrics", method=method, horizon=horizon)
    rec.update(metrics if isinstance(metrics, dict) else metrics.to_dict())
    return rec


def _run_split(S: Dataset, idx, tc: TrainConfig, methods, base: dict) -> list[dict]:
    tr, va, te = (S.subset(i) for i in idx)
    out = []
    naive = train_naive(tr, tc)
    h = naive.classifier
    if h.norm == 0:
        raise InputError("naive training produced a zero weight vector")
    out.append(_metric_record(base, "naive", "benchmark", {"accuracy": plain_accuracy(h, te)}))
    if "naive" in methods:
        short, long_ = evaluate_short_long(h, te, long_term_price(h, tr))
        out += [_metric_record(base, "naive", "short", short), _metric_record(base, "naive", "long", long_)]
    if "strat" in methods:
        st = train_strat(tr, va, tc, naive=naive)
        short, long_ = evaluate_short_long(st.state.classifier, te, st.rho_train)
        out += [_metric_record(base, "strat", "short", short), _metric_record(base, "strat", "long", long_)]
    if "masc" in methods:
        ms = train_masc(tr, va, tc, init=naive)
        hm = ms.classifier
        short, long_ = evaluate_short_long(hm, te, long_term_price(hm, tr))
        out += [_metric_record(base, "masc", "short", short), _metric_record(base, "masc", "long", long_)]
        out.append(dict(base, record="model", method="masc", w=hm.w, tau=hm.tau))
        out += [dict(base, record="history", method="masc", **row) for row in ms.history]
    return out


def _pipeline(cfg: ExperimentConfig, S: Dataset, alphas) -> list[dict]:
    tc = cfg.train_config()
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.repetitions)
    records = []
    for alpha in alphas:
        data = S if alpha is None else rescale_budgets(S, alpha)
        for k, child in enumerate(children):
            # same splits for every alpha
            rng = np.random.default_rng(child)
            idx = split_indices(len(data), cfg.split, rng)
            seed = int(child.generate_state(1)[0])
            base = {"alpha": alpha, "split": k}
            log.info("alpha=%s split %d/%d", alpha, k + 1, cfg.repetitions)
            records += _run_split(data, idx, replace(tc, seed=seed), cfg.methods, base)
    return records


def aggregate(records: list[dict]) -> list[dict]:
    """Mean and standard error of every metric per (alpha, method, horizon)."""
    groups = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.get("record") != "metrics":
            continue
        key = (r["alpha"], r["method"], r["horizon"])
        for name, v in r.items():
            if name in ("record", "alpha", "split", "method", "horizon") or v is None:
                continue
            groups[key][name].append(float(v))
    rows = []
    for (alpha, method, horizon), metrics in groups.items():
        for name, vals in sorted(metrics.items()):
            a = np.asarray(vals)
            a = a[np.isfinite(a)]
            n = a.size
            rows.append({
                "alpha": alpha, "method": method, "horizon": horizon, "metric": name, "n": n,
                "mean": float(a.mean()) if n else float("nan"),
                "stderr": float(a.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0,
            })
    return rows


def _write_aggregate(rows: list[dict], path: Path) -> None:
    cols = ["alpha", "method", "horizon", "metric", "n", "mean", "stderr"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r[k] is None else repr(r[k]) if isinstance(r[k], float) else r[k])
                        for k in cols})


def _price_records(cfg: ExperimentConfig) -> list[dict]:
    data = _load(cfg)
    if isinstance(data, Dataset):
        if cfg.alpha is not None:
            data = rescale_budgets(data, cfg.alpha)
        prof = demand_profile(_classifier(cfg, data.dim), data)
    else:
        prof = data
    q = exact_price(prof)
    rec = {"record": "price", "rho": q.rho, "setter_index": q.setter_index, "revenue": q.revenue,
           "buyers": q.buyers, "profile_size": len(prof)}
    if len(prof):
        rec["setter_percentile"] = price_setter_percentile(prof)
        rec["rho_smooth"] = smooth_price(prof, cfg.train_config().smooth).rho_smooth
    return [rec]


def _simulate_records(cfg: ExperimentConfig, out: Path) -> list[dict]:
    S = _load_dataset(cfg)
    h = _classifier(cfg, S.dim)
    rho = long_term_price(h, S) if cfg.rho is None else float(cfg.rho)
    res = simulate_market(h, S, rho)
    write_dataset(Dataset(res.post_features, S.budgets, S.labels), out / "post_market.csv")
    m = evaluate(h, S, rho)
    return [dict(record="market", total_revenue=res.total_revenue, **m.to_dict())]


def _eval_records(cfg: ExperimentConfig) -> list[dict]:
    S = _load_dataset(cfg)
    h = _classifier(cfg, S.dim)
    rho_train = long_term_price(h, S) if cfg.rho is None else float(cfg.rho)
    short, long_ = evaluate_short_long(h, S, rho_train)
    base = {"alpha": cfg.alpha, "split": None}
    return [_metric_record(base, "given", "short", short), _metric_record(base, "given", "long", long_),
            _metric_record(base, "given", "benchmark", {"accuracy": plain_accuracy(h, S)})]


def _synth_records(cfg: ExperimentConfig, out: Path) -> list[dict]:
    if cfg.scenario is None:
        raise ConfigError("synth needs a scenario")
    data = _load(cfg)
    if isinstance(data, DemandProfile):
        path = out / "profile.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["units", "budget"])
            for u, b in zip(data.units, data.budgets):
                w.writerow([repr(float(u)), repr(float(b))])
        return [{"record": "synth", "kind": "profile", "size": len(data), "path": path.name}]
    if cfg.alpha is not None:
        data = rescale_budgets(data, cfg.alpha)
    path = write_dataset(data, out / "dataset.csv")
    return [{"record": "synth", "kind": "dataset", "size": len(data), "dim": data.dim,
             "positives": int(data.labels.sum()), "path": path.name}]


def run_experiment(cfg: ExperimentConfig) -> dict[str, Path]:
    """Run ``cfg.command`` and write its reports; returns the written paths by name."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    resolved = cfg.to_dict()
    (out / "config.json").write_text(json.dumps(_clean(resolved), sort_keys=True, indent=2) + "\n",
                                     encoding="utf-8")
    paths = {"config": out / "config.json", "results": out / "results.jsonl"}
    if cfg.command in ("train", "sweep"):
        S = _load_dataset(cfg)
        if cfg.command == "sweep":
            if not cfg.alphas:
                raise ConfigError("sweep needs a non-empty 'alphas' list")
            records = _pipeline(cfg, S, cfg.alphas)
        else:
            records = _pipeline(cfg, S, [None])
        for r in records:
            if r["alpha"] is None:
                r["alpha"] = cfg.alpha
        agg = aggregate(records)
        _write_aggregate(agg, out / "aggregate.csv")
        paths["aggregate"] = out / "aggregate.csv"
    elif cfg.command == "price":
        records = _price_records(cfg)
    elif cfg.command == "simulate":
        records = _simulate_records(cfg, out)
        paths["post_market"] = out / "post_market.csv"
    elif cfg.command == "eval":
        records = _eval_records(cfg)
    else:
        records = _synth_records(cfg, out)
    with paths["results"].open("w", encoding="utf-8", newline="\n") as fh:
        # the output location is not part of the experiment
        fh.write(_dumps({"record": "config", **{k: v for k, v in resolved.items() if k != "out_dir"}}) + "\n")
        for r in records:
            fh.write(_dumps(r) + "\n")
    return paths
