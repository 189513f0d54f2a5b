"""Four ways to draw a random k-CNF, from coarse to fine.

The uniform model draws every literal slot independently.  Splitting the draw
into "degrees first, then a formula with those degrees" leaves the same
distribution (the degree law is i.i.d. Poisson conditioned on the total,
i.e. one multinomial), and conditioning further on the clause-type counts
gives the finest model.  The planted model draws the assignment first.
"""

import numpy as np

from ksatlab import core, gen, marginals

n, m, k, seed = 12, 30, 3, 7

# --- uniform -------------------------------------------------------------
f = gen.sample_uniform(n, m, k, seed)
d = core.degree_sequence_of(f)
print(f"uniform: n={f.n}, m={f.m}, k={f.k}")
print("  degree pairs:", d.degree_pairs()[:6], "...")
print("  majority weight:", float(marginals.majority_weight(d)))

# --- two-step: degrees, then a degree-compatible formula ------------------
d2 = gen.sample_degree_sequence(n, m, k, seed)
f2 = gen.sample_formula_given_degrees(d2, (seed, 1))
assert np.array_equal(core.degree_sequence_of(f2).d_pos, d2.d_pos)
print("\ntwo-step: degrees reproduced exactly on the sampled formula")

# --- three-step: degrees + clause-type counts ------------------------------
table = core.build_type_table(d2)
counts = core.clause_type_counts(f2, table)
f3 = gen.sample_formula_given_degrees_and_types(d2, counts, (seed, 2), table=table)
assert core.clause_type_counts(f3, table).counts == counts.counts
print("typed: clause-type counts reproduced exactly;")
print("  types present:", [float(table.value(z)) for z in table.type_set])

# --- planted ---------------------------------------------------------------
fp, sigma = gen.sample_planted_pair(n, m, k, seed)
assert fp.is_satisfied_by(sigma)
print("\nplanted: the drawn assignment satisfies the formula; sigma =", sigma)

# --- DIMACS round trip ------------------------------------------------------
text = core.emit_dimacs(f)
assert np.array_equal(core.parse_dimacs(text).lits, f.lits)
print("\nDIMACS head:")
print("\n".join(text.splitlines()[:5]))
