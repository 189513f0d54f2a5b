"""Seed-deterministic samplers for the nested random-formula models.

Models, from coarse to fine:

* ``sample_uniform``        -- every literal slot i.i.d. uniform over 2n literals;
* ``sample_degree_sequence`` + ``sample_formula_given_degrees`` -- first draw
  the signed degree sequence (i.i.d. Poisson conditioned on the total, which
  is exactly a multinomial over the 2n literals), then a uniformly random
  formula with those degrees via the clone/pile construction;
* ``sample_formula_given_degrees_and_types`` -- additionally condition on the
  per-clause-type counts, matching clones to slots pile by pile;
* ``sample_planted_pair``   -- assignment first, then clauses uniform among
  the k-tuples it satisfies.

All samplers are pure functions of (parameters, seed); hard constraints are
asserted on every sample.
"""

from __future__ import annotations

import numpy as np

from .core import (
    Assignment,
    ClauseTypeCounts,
    Formula,
    FormulaError,
    SignedDegreeSequence,
    TypeTable,
    build_type_table,
    degree_sequence_of,
    type_slot_demand,
)


class InfeasibleCountsError(ValueError):
    """Clause-type counts not realizable from the degree sequence's piles."""


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def derived_seed(seed, index: int) -> tuple:
    """Independent per-trial stream seed."""
    return (int(seed), int(index))


def _check_params(n: int, m: int, k: int) -> None:
    if k < 2:
        raise FormulaError(f"k must be >= 2, got {k}")
    if n < k:
        raise FormulaError(f"n must be >= k, got n={n}, k={k}")
    if m < 0:
        raise FormulaError(f"m must be >= 0, got {m}")


def sample_uniform(n: int, m: int, k: int, seed) -> Formula:
    """Uniform random k-CNF: each of the k*m slots i.i.d. over 2n literals."""
    _check_params(n, m, k)
    rng = _rng(seed)
    codes = rng.integers(0, 2 * n, size=(m, k), dtype=np.int64)
    var = (codes >> 1) + 1
    lits = np.where(codes & 1 == 0, var, -var).astype(np.int32)
    return Formula(n, k, lits)


def sample_degree_sequence(n: int, m: int, k: int, seed) -> SignedDegreeSequence:
    """Signed degree sequence distributed as 2n i.i.d. Poisson(k*r/2)
    conditioned on totalling k*m; sampled exactly as one multinomial draw of
    k*m occurrence tokens over the 2n literals (no rejection loop)."""
    _check_params(n, m, k)
    rng = _rng(seed)
    counts = rng.multinomial(k * m, np.full(2 * n, 1.0 / (2 * n)))
    d_pos = counts[0::2].astype(np.int64)
    d_neg = counts[1::2].astype(np.int64)
    d = SignedDegreeSequence(k, m, d_pos, d_neg)
    assert int(d.d_pos.sum() + d.d_neg.sum()) == k * m
    return d


def _clone_list(d: SignedDegreeSequence) -> np.ndarray:
    """DIMACS codes of all k*m literal clones."""
    pos = np.repeat(np.arange(1, d.n + 1, dtype=np.int32), d.d_pos)
    neg = np.repeat(-np.arange(1, d.n + 1, dtype=np.int32), d.d_neg)
    return np.concatenate([pos, neg])


def sample_formula_given_degrees(d: SignedDegreeSequence, seed) -> Formula:
    """Uniform d-compatible formula: shuffle the literal clones and chop the
    permutation into m clauses of k slots."""
    if d.km % d.k != 0:
        raise FormulaError("k*m not divisible by k")
    rng = _rng(seed)
    clones = _clone_list(d)
    if clones.shape[0] != d.km:
        raise FormulaError("degree total does not match k*m")
    lits = rng.permutation(clones).reshape(d.m, d.k)
    out = Formula(d.n, d.k, lits)
    check = degree_sequence_of(out)
    assert np.array_equal(check.d_pos, d.d_pos) and np.array_equal(
        check.d_neg, d.d_neg
    )
    return out


def sample_formula_given_degrees_and_types(
    d: SignedDegreeSequence,
    counts: ClauseTypeCounts,
    seed,
    table: TypeTable | None = None,
) -> Formula:
    """Uniform formula with the given degrees and per-clause-type counts.

    Clones are put on one pile per literal type and each pile is shuffled and
    matched against the clause slots that request that type.  Raises
    ``InfeasibleCountsError`` when the per-type slot demand differs from the
    per-type clone supply.  The type table is rebuilt from ``d`` unless given.
    """
    if table is None:
        table = build_type_table(d)
    if counts.m * d.k != d.km:
        raise InfeasibleCountsError(
            f"counts describe {counts.m} clauses, degrees give m={d.m}"
        )
    demand = type_slot_demand(counts)
    supply = table.mass
    for z in set(demand) | set(supply):
        if demand.get(z, 0) != supply.get(z, 0):
            raise InfeasibleCountsError(
                f"type {z}: slot demand {demand.get(z, 0)} != clone supply "
                f"{supply.get(z, 0)}"
            )
    rng = _rng(seed)

    # one shuffled pile of clone codes per type
    piles: dict[int, np.ndarray] = {}
    for z in supply:
        members = []
        for x in range(d.n):
            zx = int(table.var_z[x])
            if zx == z and d.d_pos[x]:
                members.append(np.full(int(d.d_pos[x]), x + 1, dtype=np.int32))
            if -zx == z and d.d_neg[x]:
                members.append(np.full(int(d.d_neg[x]), -(x + 1), dtype=np.int32))
        pile = np.concatenate(members) if members else np.zeros(0, dtype=np.int32)
        piles[z] = rng.permutation(pile)

    cursors = {z: 0 for z in piles}
    rows = np.zeros((counts.m, d.k), dtype=np.int32)
    i = 0
    for ell in sorted(counts.counts):
        c = counts.counts[ell]
        for _ in range(c):
            for j, z in enumerate(ell):
                pile = piles[z]
                rows[i, j] = pile[cursors[z]]
                cursors[z] += 1
            i += 1
    out = Formula(d.n, d.k, rows)
    check = degree_sequence_of(out)
    assert np.array_equal(check.d_pos, d.d_pos) and np.array_equal(
        check.d_neg, d.d_neg
    )
    return out


def sample_planted_pair(
    n: int, m: int, k: int, seed, assignment: Assignment | None = None
) -> tuple[Formula, Assignment]:
    """Assignment-first model: sigma uniform over {0,1}^n (unless given), then
    m clauses i.i.d. uniform over the k-tuples of literals not all false under
    sigma, via rejection (acceptance >= 1 - 2**-k)."""
    if k < 1:
        raise FormulaError(f"k must be >= 1, got {k}")
    if n < max(k, 1):
        raise FormulaError(f"n must be >= k, got n={n}, k={k}")
    if m < 0:
        raise FormulaError(f"m must be >= 0, got {m}")
    rng = _rng(seed)
    if assignment is None:
        sigma = rng.integers(0, 2, size=n, dtype=np.uint8)
    else:
        sigma = np.asarray(assignment, dtype=np.uint8)
        if sigma.shape != (n,):
            raise FormulaError("assignment length must be n")

    lits = np.zeros((m, k), dtype=np.int32)
    pending = np.arange(m)
    while pending.size:
        codes = rng.integers(0, 2 * n, size=(pending.size, k), dtype=np.int64)
        var = (codes >> 1).astype(np.int64)
        positive = (codes & 1) == 0
        true_under = np.where(positive, sigma[var] == 1, sigma[var] == 0)
        ok = true_under.any(axis=1)
        rows = np.where(positive, var + 1, -(var + 1)).astype(np.int32)
        lits[pending[ok]] = rows[ok]
        pending = pending[~ok]
    out = Formula(n, k, lits)
    assert out.is_satisfied_by(sigma)
    return out, sigma
