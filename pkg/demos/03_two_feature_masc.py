"""Training for the market instead of for the raw data.

Two features: ``x1`` separates the classes, ``x2`` is noise. Positives have
budget 5, negatives budget 1. A classifier that separates the raw data well
invites every negative to buy its way across once the market sets a price.
The market-aware learner (MASC) optimizes a hinge loss that accounts for
the price its own classifier will induce.
"""

import numpy as np

from marketsc import (
    TrainConfig,
    evaluate_short_long,
    long_term_price,
    plain_accuracy,
    train_masc,
    train_naive,
)
from marketsc.synthetic import ScenarioSpec, two_feature_scenario

S = two_feature_scenario(ScenarioSpec(m=4000, seed=0))
perm = np.random.default_rng(0).permutation(len(S))
train, val, test = S.subset(perm[:2800]), S.subset(perm[2800:3200]), S.subset(perm[3200:])
print(f"{len(train)} train / {len(val)} val / {len(test)} test users, {S.labels.mean():.0%} positive")

cfg = TrainConfig(learning_rate=0.1, lambda_reg=0.01, seed=0)
naive = train_naive(train, cfg).classifier
masc = train_masc(train, val, cfg).classifier

for name, h in [("naive", naive), ("MASC", masc)]:
    short, long_ = evaluate_short_long(h, test, long_term_price(h, train))
    print(f"\n{name}: w = {np.round(h.w, 3)}, tau = {h.tau:.3f}")
    print(f"  accuracy without a market  {plain_accuracy(h, test):.3f}")
    print(f"  short-term (train price)   {short.accuracy:.3f}")
    print(f"  long-term (re-priced)      {long_.accuracy:.3f}  "
          f"price {long_.rho_used:.3f}, negatives crossing {long_.crossed_neg_ratio:.2f}")
