"""Counting assignments with prescribed neutral-type weight.

The number of half-weight assignments over the balanced-type variables is a
coefficient of prod (z^{d_v} + z^{d_neg_v}); pairs with a prescribed overlap
need a three-variable product.  Exact big-integer convolution provides the
oracle; the saddle-point method provides N^{-1/2} 2^N and E N^{-3/2}
asymptotics whose accuracy the oracle adjudicates.
"""

import math

import numpy as np

from ksatlab import saddle

rng = np.random.default_rng(1)
pairs = [(int(a), int(b)) for a, b in rng.poisson(4.5, size=(200, 2))]
if sum(a + b for a, b in pairs) % 2:
    pairs[0] = (pairs[0][0] + 1, pairs[0][1])
M = sum(a + b for a, b in pairs)

exact = saddle.exact_coefficient(pairs, M // 2)
approx = saddle.coeff_simple_asymptotic(pairs)
print(f"central coefficient, N=200 Poisson pairs (M={M}):")
print(f"  exact      = {exact}")
print(f"  asymptotic = {approx:.6e}")
print(f"  ratio      = {approx / exact:.5f}")

# local limit theorem: the same machinery for sums of i.i.d. integers
fair = saddle.local_limit(saddle.pgf_bernoulli(0.5), 0.5, 100)
print(f"\nP[Bin(100,1/2) = 50]: saddle {fair:.6f} vs exact "
      f"{math.comb(100, 50) / 2**100:.6f}")

# off-center targets: the tilt rho solves the weighted mean equation
pairs60 = [(int(a), int(b)) for a, b in rng.poisson(4.5, size=(60, 2))]
excess = sum(a + b for a, b in pairs60) % 100
i = 0
while excess > 0:  # make M divisible by 100 so eps = 0.02 is integral
    if pairs60[i % 60][0] > 1:
        pairs60[i % 60] = (pairs60[i % 60][0] - 1, pairs60[i % 60][1])
        excess -= 1
    i += 1

for eps in (0.0, 0.02):
    rho = saddle.solve_rho(pairs60, eps)
    ex3 = saddle.exact_triple_coefficient(pairs60, eps)
    ap3 = saddle.coeff_triple_asymptotic(pairs60, eps)
    print(f"\ntriple coefficient at eps={eps}: rho = {rho:.6f}")
    print(f"  exact      = {ex3}")
    print(f"  asymptotic = {ap3:.6e}   ratio = {ap3 / ex3:.4f}")

# marginalizing the triple oracle over the overlap recovers the square
small = [(int(a), int(b)) for a, b in rng.poisson(3.0, size=(12, 2))]
if sum(a + b for a, b in small) % 2:
    small[0] = (small[0][0] + 1, small[0][1])
m_small = sum(a + b for a, b in small)
profile = saddle.exact_triple_u_coefficients(small)
simple = saddle.exact_coefficient(small, m_small // 2)
print(f"\nmarginalization identity at N=12: sum_u = {sum(profile)} "
      f"= (central)^2 = {simple**2}")
