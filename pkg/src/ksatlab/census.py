"""Exhaustive enumeration oracle for small-n formulas.

Ground truth for satisfying assignments, marginals, distances, overlaps and
clusters.  The workhorse is a Gray-code walk over the assignment cube with
incremental per-clause true-literal counters (O(1) amortized work per step
after O(m) setup), JIT-compiled with numba when available.  A DPLL-style
backtracking counter provides an independent second route for model counts.

Assignments are encoded as integer codes with bit ``i`` holding the value of
variable ``i``; streams are emitted in lexicographic order of the assignment
vector (variable 0 most significant).
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from .core import (
    Assignment,
    ClauseTypeCounts,
    Formula,
    SignedDegreeSequence,
    TypeTable,
    degree_sequence_of,
)
from .marginals import majority_vote

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap

    _HAVE_NUMBA = False


DEFAULT_CAP = 30


class CapExceededError(ValueError):
    """Instance larger than the configured exhaustive-enumeration cap."""


def _check_cap(formula: Formula, cap: int) -> None:
    if formula.n > cap:
        raise CapExceededError(
            f"n={formula.n} exceeds the enumeration cap {cap}; "
            "raise `cap` explicitly if you really want 2^n work"
        )


# ---------------------------------------------------------------------------
# Gray-code kernel
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _gray_walk(nfree, var_codes, occ_start, occ_clause, occ_delta, cnt, out_codes, record, base_code):
    """Walk the 2^nfree subcube in Gray order, maintaining per-clause counts.

    Returns the number of satisfying assignments; when ``record`` is true the
    codes are written to ``out_codes`` (which must be large enough).
    """
    m = cnt.shape[0]
    nunsat = 0
    for c in range(m):
        if cnt[c] == 0:
            nunsat += 1
    code = base_code
    nsol = 0
    if nunsat == 0:
        if record:
            out_codes[nsol] = code
        nsol += 1
    total = np.int64(1) << nfree
    step = np.int64(1)
    while step < total:
        b = 0
        s = step
        while s & 1 == 0:
            s >>= 1
            b += 1
        # flip free variable b; its new value is bit b of the Gray code of step
        code ^= var_codes[b]
        up = (code & var_codes[b]) != 0
        for idx in range(occ_start[b], occ_start[b + 1]):
            c = occ_clause[idx]
            old = cnt[c]
            if up:
                new = old + occ_delta[idx]
            else:
                new = old - occ_delta[idx]
            cnt[c] = new
            if old == 0:
                nunsat -= 1
            if new == 0:
                nunsat += 1
        if nunsat == 0:
            if record:
                out_codes[nsol] = code
            nsol += 1
        step += 1
    return nsol


def _occurrence_tables(formula: Formula, order: np.ndarray):
    """CSR-style (clause, delta) lists per variable in walk-bit order.

    delta = net change of the clause's true-literal count when the variable
    flips 0 -> 1; zero-delta occurrences are dropped.
    """
    per_var: list[dict] = [dict() for _ in range(formula.n)]
    for ci, row in enumerate(formula.lits):
        for code in row:
            v = abs(int(code)) - 1
            delta = 1 if code > 0 else -1
            per_var[v][ci] = per_var[v].get(ci, 0) + delta
    starts = [0]
    clause_idx = []
    deltas = []
    for b in range(order.shape[0]):
        v = int(order[b])
        for ci, delta in sorted(per_var[v].items()):
            if delta != 0:
                clause_idx.append(ci)
                deltas.append(delta)
        starts.append(len(clause_idx))
    return (
        np.asarray(starts, dtype=np.int64),
        np.asarray(clause_idx, dtype=np.int64),
        np.asarray(deltas, dtype=np.int64),
    )


def _initial_counts(formula: Formula, base_vals: np.ndarray) -> np.ndarray:
    if formula.m == 0:
        return np.zeros(0, dtype=np.int64)
    return formula.literal_values(base_vals).sum(axis=1).astype(np.int64)


def _walk_order(formula: Formula) -> np.ndarray:
    """Variables sorted by update cost ascending: the cheap ones go on the
    fast-flipping Gray bits."""
    cost = np.zeros(formula.n, dtype=np.int64)
    if formula.m:
        d = degree_sequence_of(formula)
        cost = d.d_pos + d.d_neg
    return np.argsort(cost, kind="stable").astype(np.int64)


def _run_partitions(formula: Formula, record: bool, threads: int):
    """Count (and optionally record) satisfying codes, partitioning the cube
    by the slowest-flipping variables when threads > 1."""
    n = formula.n
    if n == 0:
        codes = np.zeros(1, dtype=np.int64)
        return 1, (codes if record else None)
    order = _walk_order(formula)
    nparts = 1
    tbits = 0
    while nparts < threads and tbits < max(n - 1, 0) and tbits < 8:
        nparts *= 2
        tbits += 1
    nfree = n - tbits
    free_order = order[:nfree]
    fixed_vars = order[nfree:]
    occ_start, occ_clause, occ_delta = _occurrence_tables(formula, free_order)
    var_codes = (np.int64(1) << free_order).astype(np.int64)

    def run(part: int, out_buf=None):
        base_vals = np.zeros(n, dtype=np.uint8)
        base_code = np.int64(0)
        for j, v in enumerate(fixed_vars):
            if (part >> j) & 1:
                base_vals[v] = 1
                base_code |= np.int64(1) << np.int64(v)
        cnt = _initial_counts(formula, base_vals)
        buf = out_buf if out_buf is not None else np.zeros(0, dtype=np.int64)
        got = _gray_walk(
            np.int64(nfree),
            var_codes,
            occ_start,
            occ_clause,
            occ_delta,
            cnt,
            buf,
            out_buf is not None,
            base_code,
        )
        return int(got)

    counts = [0] * nparts
    if threads > 1 and nparts > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            for part, got in enumerate(ex.map(run, range(nparts))):
                counts[part] = got
    else:
        for part in range(nparts):
            counts[part] = run(part)
    total = sum(counts)
    if not record:
        return total, None
    bufs = [np.zeros(c, dtype=np.int64) for c in counts]

    def run_rec(part):
        if counts[part]:
            got = run(part, out_buf=bufs[part])
            assert got == counts[part]

    if threads > 1 and nparts > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(run_rec, range(nparts)))
    else:
        for part in range(nparts):
            run_rec(part)
    codes = np.concatenate(bufs) if bufs else np.zeros(0, dtype=np.int64)
    return total, codes


def _lex_keys(codes: np.ndarray, n: int) -> np.ndarray:
    """Bit-reverse within n bits so variable 0 becomes most significant."""
    keys = np.zeros_like(codes)
    for i in range(n):
        keys |= ((codes >> i) & 1) << (n - 1 - i)
    return keys


def satisfying_codes(
    formula: Formula, cap: int = DEFAULT_CAP, threads: int = 1
) -> np.ndarray:
    """All satisfying assignment codes, in lexicographic assignment order."""
    _check_cap(formula, cap)
    _, codes = _run_partitions(formula, record=True, threads=threads)
    if codes.size:
        codes = codes[np.argsort(_lex_keys(codes, formula.n), kind="stable")]
    return codes


def count_satisfying(formula: Formula, cap: int = DEFAULT_CAP, threads: int = 1) -> int:
    """Model count via the Gray-code walk."""
    _check_cap(formula, cap)
    total, _ = _run_partitions(formula, record=False, threads=threads)
    return total


def assignment_from_code(code: int, n: int) -> Assignment:
    return np.array([(int(code) >> i) & 1 for i in range(n)], dtype=np.uint8)


def code_of_assignment(sigma: Assignment) -> int:
    return int(sum(int(v) << i for i, v in enumerate(np.asarray(sigma))))


def enumerate_satisfying(formula: Formula, cap: int = DEFAULT_CAP, threads: int = 1):
    """Stream the satisfying assignments in lexicographic order."""
    for code in satisfying_codes(formula, cap=cap, threads=threads):
        yield assignment_from_code(int(code), formula.n)


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def count_satisfying_naive(formula: Formula, cap: int = 16) -> int:
    """Vectorized re-evaluation of every assignment; cross-check only."""
    _check_cap(formula, cap)
    n = formula.n
    codes = np.arange(1 << n, dtype=np.int64)
    sat = np.ones(codes.shape[0], dtype=bool)
    for row in formula.lits:
        clause_true = np.zeros(codes.shape[0], dtype=bool)
        for code in row:
            v = abs(int(code)) - 1
            bit = (codes >> v) & 1
            clause_true |= (bit == 1) if code > 0 else (bit == 0)
        sat &= clause_true
    return int(sat.sum())


def count_satisfying_backtracking(formula: Formula) -> int:
    """DPLL-style #SAT: unit propagation, tautology elimination, branching on
    the most frequent variable, counting 2^(free) on empty residual formulas."""
    n = formula.n
    clauses = []
    for row in formula.lits:
        lits = frozenset(int(c) for c in row)
        if any(-l in lits for l in lits):
            continue  # tautological clause, satisfied by every assignment
        clauses.append(tuple(sorted(lits)))
    if not clauses:
        return 1 << n

    def reduce(clauses, lit):
        out = []
        for cl in clauses:
            if lit in cl:
                continue
            if -lit in cl:
                red = tuple(l for l in cl if l != -lit)
                if not red:
                    return None
                out.append(red)
            else:
                out.append(cl)
        return out

    def rec(clauses, nfree):
        while True:
            unit = None
            for cl in clauses:
                if len(cl) == 1:
                    unit = cl[0]
                    break
            if unit is None:
                break
            clauses = reduce(clauses, unit)
            nfree -= 1
            if clauses is None:
                return 0
        if not clauses:
            return 1 << nfree
        freq = Counter(abs(l) for cl in clauses for l in cl)
        v = freq.most_common(1)[0][0]
        total = 0
        for lit in (v, -v):
            red = reduce(clauses, lit)
            if red is not None:
                total += rec(red, nfree - 1)
        return total

    return rec(clauses, n)


# ---------------------------------------------------------------------------
# Derived statistics
# ---------------------------------------------------------------------------


def empirical_marginal_counts(
    formula: Formula, cap: int = DEFAULT_CAP, threads: int = 1
):
    """(per-variable count of satisfying assignments with x true, |S|)."""
    codes = satisfying_codes(formula, cap=cap, threads=threads)
    n = formula.n
    counts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        counts[i] = int(((codes >> i) & 1).sum())
    return counts, int(codes.size)


def empirical_marginals(
    formula: Formula, cap: int = DEFAULT_CAP, threads: int = 1
) -> np.ndarray:
    """mu(x) = fraction of satisfying assignments with x true."""
    counts, nsat = empirical_marginal_counts(formula, cap=cap, threads=threads)
    if nsat == 0:
        raise ValueError("formula is unsatisfiable; marginals undefined")
    return counts / nsat


def mean_distance_to_majority(
    formula: Formula, cap: int = DEFAULT_CAP, threads: int = 1
) -> Fraction:
    """Average Hamming distance of satisfying assignments from the majority
    vote, normalized by n.  Exact rational."""
    counts, nsat = empirical_marginal_counts(formula, cap=cap, threads=threads)
    if nsat == 0:
        raise ValueError("formula is unsatisfiable; distance undefined")
    maj = majority_vote(degree_sequence_of(formula))
    disagree = 0
    for x in range(formula.n):
        cx = int(counts[x])
        disagree += (nsat - cx) if maj[x] else cx
    return Fraction(disagree, nsat * formula.n)


def cluster_of(
    sigma: Assignment,
    formula: Formula,
    delta: float | None = None,
    cap: int = DEFAULT_CAP,
    threads: int = 1,
) -> np.ndarray:
    """Codes of the satisfying assignments whose normalized distance from
    sigma falls outside the band [1/2 - delta, 1/2 + delta].

    The default delta k^2 * 2^(-k/2) exceeds 1/2 for k <= 5, in which case the
    cluster is empty by definition (recorded behavior, not an error).
    """
    if delta is None:
        delta = formula.k**2 * 2.0 ** (-formula.k / 2.0)
    codes = satisfying_codes(formula, cap=cap, threads=threads)
    if codes.size == 0:
        return codes
    ref = np.int64(code_of_assignment(sigma))
    dist = np.bitwise_count(codes ^ ref).astype(np.int64)
    frac = dist / formula.n if formula.n else dist.astype(float)
    inside_band = (frac >= 0.5 - delta) & (frac <= 0.5 + delta)
    return codes[~inside_band]


def pair_distance_spectrum(
    formula: Formula, cap: int = 20, threads: int = 1
) -> np.ndarray:
    """Counts of ordered satisfying pairs (sigma, tau) per Hamming distance.

    Uses a Walsh-Hadamard autocorrelation when n <= 20 (exact in int64),
    otherwise falls back to blockwise pairwise popcounts.
    """
    _check_cap(formula, cap)
    n = formula.n
    codes = satisfying_codes(formula, cap=cap, threads=threads)
    spectrum = np.zeros(n + 1, dtype=np.int64)
    if codes.size == 0:
        return spectrum
    if n <= 20:
        f = np.zeros(1 << n, dtype=np.int64)
        f[codes] = 1
        F = _walsh_hadamard(f)
        G = _walsh_hadamard(F * F)
        assert np.all(G % (1 << n) == 0)
        G >>= n  # inverse transform normalization
        xor_vals = np.arange(1 << n, dtype=np.int64)
        dists = np.bitwise_count(xor_vals).astype(np.int64)
        np.add.at(spectrum, dists, G)
        return spectrum
    if codes.size**2 > 2 * 10**8:
        raise CapExceededError(
            f"{codes.size}^2 ordered pairs is too many for the pairwise path"
        )
    block = 4096
    for i in range(0, codes.size, block):
        chunk = codes[i : i + block]
        d = np.bitwise_count(chunk[:, None] ^ codes[None, :])
        binc = np.bincount(d.ravel(), minlength=n + 1)
        spectrum += binc.astype(np.int64)
    return spectrum


def _walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized in-place Walsh-Hadamard transform (length a power of 2)."""
    a = a.copy()
    ln = a.shape[0]
    h = 1
    while h < ln:
        a = a.reshape(-1, 2 * h)
        left = a[:, :h].copy()
        right = a[:, h : 2 * h].copy()
        a[:, :h] = left + right
        a[:, h : 2 * h] = left - right
        a = a.reshape(ln)
        h *= 2
    return a


# ---------------------------------------------------------------------------
# Overlaps
# ---------------------------------------------------------------------------


def overlap_vector(
    sigma: Assignment,
    tau: Assignment,
    d: SignedDegreeSequence,
    table: TypeTable,
) -> dict:
    """Per-type fraction of literal occurrences true under both assignments,
    O_t = (true-true mass of type t) / (pi(t) * km).  Exact rationals; types
    with zero occurrence mass are reported as 0."""
    sigma = np.asarray(sigma, dtype=np.uint8)
    tau = np.asarray(tau, dtype=np.uint8)
    both_mass: dict[int, int] = {z: 0 for z in table.type_set}
    for x in range(d.n):
        z = int(table.var_z[x])
        if sigma[x] and tau[x]:
            both_mass[z] += int(d.d_pos[x])
        if not sigma[x] and not tau[x]:
            both_mass[-z] += int(d.d_neg[x])
    out = {}
    for z in table.type_set:
        mass = table.mass.get(z, 0)
        out[z] = Fraction(both_mass[z], mass) if mass else Fraction(0)
    return out


def overlap_matrix(
    sigma: Assignment,
    tau: Assignment,
    formula: Formula,
    table: TypeTable,
) -> dict:
    """Per (clause type, position): fraction of that type's clauses whose
    j-th literal is true under both sigma and tau.  Exact rationals."""
    vals_s = formula.literal_values(sigma)
    vals_t = formula.literal_values(tau)
    both = vals_s & vals_t
    var = np.abs(formula.lits) - 1
    zmat = table.var_z[var] * np.sign(formula.lits)
    acc: dict[tuple, list] = {}
    for row_z, row_b in zip(zmat, both):
        key = tuple(int(v) for v in row_z)
        cnt, tr = acc.get(key, (0, None))
        if tr is None:
            tr = np.zeros(formula.k, dtype=np.int64)
        acc[key] = (cnt + 1, tr + row_b)
    return {
        ell: tuple(Fraction(int(t), cnt) for t in tr)
        for ell, (cnt, tr) in acc.items()
    }


def overlap_vector_from_matrix(
    omega: dict, counts: ClauseTypeCounts, table: TypeTable
) -> dict:
    """Marginalize an overlap matrix back to the per-type overlap vector:
    O_t = sum over (ell, j) with ell_j = t of m(ell) * omega_{ell,j} / (pi(t) km)."""
    num: dict[int, Fraction] = {z: Fraction(0) for z in table.type_set}
    for ell, row in omega.items():
        m_ell = counts.counts[ell]
        for z, w in zip(ell, row):
            num[z] += m_ell * w
    out = {}
    for z in table.type_set:
        mass = table.mass.get(z, 0)
        out[z] = num[z] / mass if mass else Fraction(0)
    return out


def overlap_star(table: TypeTable) -> dict:
    """Reference overlap vector (t^2 per type)."""
    return {z: table.value(z) ** 2 for z in table.type_set}


def omega_star(ell: tuple, table: TypeTable) -> tuple:
    """Reference overlap-matrix row (ell_j^2 per position)."""
    return tuple(table.value(z) ** 2 for z in ell)
