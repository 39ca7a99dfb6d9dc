"""Moving a threshold away from the data can raise accuracy.

One feature ``z``: negatives on [-1, 0), positives on (0, 1]. Budgets grow
with ``z``. As the classifier's threshold moves right, everyone below it
wants to buy, the seller prices for the richest per-unit buyers, and at some
point only positives can afford to cross. With equal budgets that screening
never happens.
"""

import numpy as np

from marketsc.analysis import threshold_sweep
from marketsc.synthetic import ScenarioSpec, gaussian_threshold_scenario

thresholds = np.round(np.arange(-0.5, 2.01, 0.25), 2)
for b_max, label in [(5.0, "budgets rising 1 -> 5"), (1.0, "equal budgets")]:
    S, desc = gaussian_threshold_scenario(ScenarioSpec(kind="gaussian_threshold", m=4000, b_max=b_max))
    print(f"{desc}\n  ({label})")
    print("  threshold  price   accuracy  pos crossed  neg crossed")
    for row in threshold_sweep([1.0], S, -thresholds):
        print(f"  {-row['tau']:9.2f}  {row['rho']:6.3f}  {row['accuracy']:8.3f}"
              f"  {row['crossed_pos_ratio']:11.3f}  {row['crossed_neg_ratio']:11.3f}")
    print()
