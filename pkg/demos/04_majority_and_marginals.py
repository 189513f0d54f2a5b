"""The majority vote, literal types, and the prescriptions they induce.

Each variable's occurrence imbalance z = d_x - d_neg_x prescribes a true
probability 1/2 + z/2^(k+1) (neutral beyond a cutoff, and for over-degreed or
perfectly balanced signatures).  Assignments can then be graded: do they hit
the prescribed per-type fractions (p-marginals), per-clause-slot fractions
(judicious), or the crude half-true-occurrences mark (balanced)?
"""

import numpy as np

from ksatlab import core, gen, marginals

k = 10
mm = marginals.MarginalMap(k)
print(f"marginal map at k={k}: cutoff = {mm.cutoff:.1f}")
for z in (0, 4, -4, 100, 2000):
    print(f"  z={z:+6d} -> p = {float(mm(z)):.9f}")

# a typical instance
n, m = 50, 200
f = gen.sample_uniform(n, m, 3, 21)
d = core.degree_sequence_of(f)
table = core.build_type_table(d)
maj = marginals.majority_vote(d)
w = marginals.majority_weight(d)
print(f"\nn={n}, m={m}, k=3: majority weight = {float(w):.4f}")
print("  realized types:", sorted(float(table.value(z)) for z in table.type_set))
print("  skew statistic:", float(marginals.sigma_skew(d, table)))

# grade a few assignments
rng = np.random.default_rng(0)
for name, sigma in (
    ("majority vote ", maj),
    ("all-false     ", np.zeros(n, np.uint8)),
    ("uniform random", rng.integers(0, 2, n).astype(np.uint8)),
):
    print(
        f"  {name}: balanced={marginals.is_balanced(sigma, f)}, "
        f"p-marginals={marginals.has_p_marginals(sigma, d, table)}, "
        f"judicious={marginals.is_judicious(sigma, f, table)}"
    )

print("\nconjectured marginal vs imbalance at k=3:")
for z in (-4, -2, 0, 2, 4):
    print(f"  z={z:+d} -> {float(marginals.bp_conjectured_marginal(z, 0, 3)):.4f}")
