"""Who sets the market price?

A seller facing users with demand ``u`` (units needed to cross the
classifier) and budgets ``b`` posts one price per unit. Only prices of the
form ``b_i / u_i`` can be optimal, so the exact price is a scan over sorted
normalized demand. This script shows that the price is usually set by a
user deep in the tail, so nearly everyone who wants to buy can afford to.
"""

from marketsc import DemandProfile, exact_price, price_setter_percentile, revenue_curve
from marketsc.analysis import PdfSpec, expected_maximizer, sensitivity_add_point
from marketsc.synthetic import beta_demand

print("A toy market: three users needing 1, 2 and 4 units, one unit of budget each.")
toy = DemandProfile.from_pairs([1.0, 2.0, 4.0])
for rho, rev in revenue_curve(toy).candidates:
    print(f"  price {rho:.3f} -> revenue {rev:.3f}")
q = exact_price(toy)
print(f"The seller picks {q.rho}; all {q.buyers} users buy.\n")

print("Beta-distributed demand on [1, 10], 2000 users, unit budgets:")
for a, b in [(0.5, 2.0), (2.0, 2.0), (5.0, 1.0), (0.5, 5.0)]:
    prof = beta_demand(a, b, 1, 10, m=2000, seed=0)
    print(f"  Beta({a}, {b}): price {exact_price(prof).rho:.4f}, "
          f"setter percentile {price_setter_percentile(prof):.3f}")

print("\nAt population level the revenue-maximizing demand sits at the right edge for uniform demand:")
for spec in (PdfSpec("uniform", (), 1, 10), PdfSpec("beta", (2, 3), 1, 10)):
    u_star, unique = expected_maximizer(spec)
    print(f"  {spec.family}{spec.params}: u* = {u_star:.3f} (certified unique: {unique})")

print("\nAdding one user to a market needing 1, 2, 3 and 5 units can push the price either way:")
base = DemandProfile.from_pairs([1.0, 2.0, 3.0, 5.0])
for row in sensitivity_add_point(base, [0.5, 2.5, 4.0, 6.0, 8.0, 10.0]):
    tag = "new user sets it" if row["new_point_sets_price"] else "incumbent sets it"
    print(f"  u0 = {row['u0']:5.2f}: price {row['rho']:.4f} ({tag})")
