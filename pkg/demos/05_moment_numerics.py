"""The first- and second-moment machinery, numerically.

The tilting vector q makes the conditioned slot expectation match the type
value; assembling entropy + satisfaction + slot-count terms gives the
first-moment exponent, which at typical type-table moments lands on
2^-k (rho - ln2/2).  The pair system pins both assignments of a pair; its
exponent is stationary at the reference overlap row with curvature O~(4^-k),
and the off-diagonal distance band is ruled out by a 100k-point sweep.
"""

import math

import numpy as np

from ksatlab import bounds, moments

# first-moment fixed point
sol = moments.solve_first_moment_q([0.5] * 3)
print("k=3 symmetric tilting:", sol.q[0], "= (3 - sqrt 5)/2 =", (3 - math.sqrt(5)) / 2)

sol20 = moments.solve_first_moment_q([0.5] * 20)
print(f"k=20: q - (1/2 - 2^-21) = {sol20.q[0] - (0.5 - 2.0**-21):.3e}")

# assembled exponent on a table with typical occurrence moments: every
# variable imbalanced by one standard deviation +-sqrt(kr), total degree ~kr
from ksatlab import core  # noqa: E402


def typical_two_type_table(k):
    r = bounds.r_bp(k)
    g = round(k * r)
    z0 = round(math.sqrt(k * r))
    if (g - z0) % 2:
        z0 += 1
    n = 2 * k
    half = n // 2
    d = core.SignedDegreeSequence(
        k,
        (n * g) // k,
        np.array([(g + z0) // 2] * half + [(g - z0) // 2] * half, dtype=np.int64),
        np.array([(g - z0) // 2] * half + [(g + z0) // 2] * half, dtype=np.int64),
    )
    return core.build_type_table(d), g / k


print()
for k in (12, 15, 20):
    table, r_eff = typical_two_type_table(k)
    fme = moments.first_moment_exponent(table, r=r_eff)
    print(
        f"k={k}: 2^k * exponent = {2.0**k * fme.exponent:.5f}   "
        f"target rho - ln2/2 = {fme.rho - math.log(2) / 2:.5f}"
    )

# pair system at and near the reference row
k = 10
pair = moments.solve_pair_q([0.5] * k, [0.25] * k, k)
print(f"\nk={k} reference row: max|q11 - q^2| = "
      f"{np.max(np.abs(pair.q11 - pair.q**2)):.2e}")
print("pair exponent:", moments.pair_exponent([0.5] * k, [0.25] * k, k))
print("gradient at the reference row:",
      float(np.max(np.abs(moments.pair_gradient([0.5] * k, k)))))
h = moments.check_hessian_bound([0.5] * k, k)
print(f"curvature: max |second difference| = {h.max_abs:.3e}  "
      f"(bound k^6 4^-k = {h.bound:.3e})")

# off-diagonal sweep
for kk in (12, 20):
    rep = moments.verify_offdiag(kk, bounds.r_bp(kk))
    print(f"\noff-diagonal sweep k={kk}: {rep.n_points} points, "
          f"max value {rep.max_value:.6f} at x = {rep.argmax_x:.5f} "
          f"-> all negative: {rep.all_negative}")
