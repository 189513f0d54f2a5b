"""Where the random k-SAT threshold is pinned down.

Three closed-form bounds bracket the satisfiability threshold: the
first-moment upper bound, the balanced-assignment lower bound, and the
BP-informed lower bound.  The last two differ by (k-2) ln2 / 2 + 1, while the
remaining upper-vs-lower gap is the k-independent constant ln2 - 1/2 ~ 0.19.
"""

import math

from ksatlab import bounds

print("k      r_bal          r_bp           r_upper        gap(upper-bp)")
for k in (3, 4, 5, 7, 10, 15, 20, 30):
    b = bounds.threshold_bounds(k)
    print(
        f"{k:<5}  {b.r_bal:<13.4f}  {b.r_bp:<13.4f}  {b.r_upper:<13.4f}  "
        f"{b.gap_upper_bp():.12f}"
    )

print()
print("ln2 - 1/2 =", math.log(2) - 0.5)
print("note:", bounds.threshold_bounds(10).caveat)

print()
print("Expected majority weight (how lopsided a random formula looks):")
for k, r in ((3, 3.0), (3, 4.2), (5, 18.0), (10, 700.0)):
    closed = bounds.expected_majority_weight(k, r)
    est = bounds.majority_weight_normal_estimate(k, r)
    print(
        f"  k={k:<3} r={r:<7} closed form {closed:.4f}   "
        f"normal-approximation assembly {est:.4f}  (simulations match the latter)"
    )
