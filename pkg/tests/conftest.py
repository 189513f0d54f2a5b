import math

import numpy as np
import pytest

from ksatlab import bounds, core


def poisson_pairs(n_pairs, seed, mean=4.5, make_even=True, divisible=None):
    """Degree pairs with i.i.d. Poisson marginals (the conditional-model
    marginal law), optionally adjusted so the total is even / divisible."""
    rng = np.random.default_rng(seed)
    pairs = [[int(a), int(b)] for a, b in rng.poisson(mean, size=(n_pairs, 2))]
    total = sum(a + b for a, b in pairs)
    if divisible:
        target = (total // divisible) * divisible
        excess = total - target
        i = 0
        while excess > 0:
            if pairs[i % n_pairs][0] > 1:
                pairs[i % n_pairs][0] -= 1
                excess -= 1
            i += 1
    elif make_even and total % 2:
        pairs[0][0] += 1
    return [tuple(p) for p in pairs]


def typical_two_type_table(k):
    """Two-type degree sequence with the occurrence moments of a typical
    conditional-Poisson draw at the BP density: every variable imbalanced by
    +-z0 ~ sqrt(k r) with total degree g ~ k r."""
    r = bounds.r_bp(k)
    g = round(k * r)
    z0 = round(math.sqrt(k * r))
    if (g - z0) % 2:
        z0 += 1
    n = 2 * k
    m = (n * g) // k
    half = n // 2
    d_pos = np.array([(g + z0) // 2] * half + [(g - z0) // 2] * half, dtype=np.int64)
    d_neg = np.array([(g - z0) // 2] * half + [(g + z0) // 2] * half, dtype=np.int64)
    d = core.SignedDegreeSequence(k, m, d_pos, d_neg)
    return core.build_type_table(d), m / n


def balanced_table(k):
    """Single-neutral-type degree sequence: every variable perfectly
    balanced at the BP density."""
    r = bounds.r_bp(k)
    g = round(k * r)
    if g % 2:
        g += 1
    n = 2 * k
    m = (n * g) // k
    d = core.SignedDegreeSequence(
        k, m, np.full(n, g // 2, dtype=np.int64), np.full(n, g // 2, dtype=np.int64)
    )
    return core.build_type_table(d), m / n


@pytest.fixture(scope="session")
def warm_census():
    """Compile the enumeration kernel once so timings elsewhere are honest."""
    from ksatlab import census

    f = core.Formula.from_dimacs_rows(3, 3, [[1, 2, 3]])
    census.count_satisfying(f)
    return census
