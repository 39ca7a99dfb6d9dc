"""The experiment pipeline end to end, as the CLI runs it.

Budgets follow a feature unrelated to the label. Rescaling them to
``[1, 2**alpha]`` widens the gap between rich and poor; the sweep trains
naive, strat and MASC models on the same seeded splits for each ``alpha``
and reports short- and long-term accuracy.

Equivalent CLI call: ``marketsc sweep --config sweep.json --out DIR``.
"""

import csv
import sys
import tempfile
from pathlib import Path

from marketsc.experiment import ExperimentConfig, run_experiment

quick = "--full" not in sys.argv
cfg = ExperimentConfig(
    command="sweep",
    scenario={"kind": "budget_label_independent", "m": 2000 if quick else 5000, "seed": 12},
    train={"learning_rate": 0.1, "lambda_reg": 0.01, **({"epochs": 20} if quick else {})},
    alphas=(2, 6, 10),
    repetitions=2 if quick else 5,
    seed=12,
    out_dir=tempfile.mkdtemp(prefix="sweep-"),
)
print(f"running {'a quick' if quick else 'the full'} sweep into {cfg.out_dir} ...")
paths = run_experiment(cfg)

with Path(paths["aggregate"]).open() as fh:
    rows = [r for r in csv.DictReader(fh) if r["metric"] == "accuracy"]
print("alpha  method  horizon     mean    stderr")
for r in rows:
    print(f"{float(r['alpha']):5.0f}  {r['method']:6s}  {r['horizon']:9s}  "
          f"{float(r['mean']):.3f}  {float(r['stderr']):.3f}")
