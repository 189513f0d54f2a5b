"""Exhaustive ground truth at small n.

A Gray-code walk with incremental clause counters enumerates the satisfying
assignments of instances up to ~30 variables; an independent DPLL-style
backtracking counter cross-checks every count.  From the enumeration we read
off marginals, the pull toward the majority vote, pair-distance spectra and
clusters.
"""

from ksatlab import census, core, gen

# a single clause leaves 7 of 8 assignments alive
f1 = core.Formula.from_dimacs_rows(3, 3, [[1, 2, 3]])
print("single clause: count =", census.count_satisfying(f1))
print("  marginals:", census.empirical_marginals(f1), "(= 4/7 each)")
print("  mean distance to majority:", census.mean_distance_to_majority(f1), "< 1/2")

# random instance near the k=3 threshold
f = gen.sample_uniform(18, 72, 3, 11)
gray = census.count_satisfying(f)
backtrack = census.count_satisfying_backtracking(f)
print(f"\nn=18, m=72 (r=4.0): gray count = {gray}, backtracking count = {backtrack}")
assert gray == backtrack

if gray:
    mu = census.empirical_marginals(f)
    d = core.degree_sequence_of(f)
    z = d.imbalance()
    print("  imbalance vs marginal (first 6 vars):")
    for x in range(6):
        print(f"    z={int(z[x]):+d}  mu={mu[x]:.3f}")
    print("  normalized mean distance to majority:",
          float(census.mean_distance_to_majority(f)))

# pair-distance spectrum: total mass is count^2
spec = census.pair_distance_spectrum(gen.sample_uniform(12, 36, 3, 3))
print("\npair-distance spectrum:", spec.tolist())
print("  total mass:", int(spec.sum()))

# clusters: at k=3 the default band is wider than [0,1]; pass delta explicitly
f2 = gen.sample_uniform(12, 30, 3, 5)
codes = census.satisfying_codes(f2)
sigma = census.assignment_from_code(int(codes[0]), 12)
cluster = census.cluster_of(sigma, f2, delta=0.2)
print(f"\ncluster of one solution (delta=0.2): {cluster.size} of {codes.size}")
