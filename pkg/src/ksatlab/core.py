"""Domain types for k-CNF formulas, signed degree sequences, literal types.

Conventions used across the package:

* variables are 0-based indices ``0..n-1``;
* a literal is a variable index plus a sign (+1 positive, -1 negated);
* formulas store clauses as an ``(m, k)`` int32 array in DIMACS encoding
  (variable ``i`` appears as ``i+1`` or ``-(i+1)``), duplicates allowed;
* an assignment is a 0/1 vector of length ``n`` (``numpy.uint8``);
* literal types are exact dyadic rationals ``1/2 + z / 2**(k+1)`` and are
  represented by their integer numerator ``z`` so equality is never a float
  comparison.  ``type_value`` converts ``z`` back to the ``Fraction``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Assignment = np.ndarray  # 0/1 vector of length n
ClauseType = tuple  # k-tuple of type numerators z


class FormulaError(ValueError):
    """Raised for structurally invalid formulas or degree sequences."""


@dataclass(frozen=True)
class Literal:
    """A signed occurrence of a variable."""

    variable_index: int
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise FormulaError(f"sign must be +1 or -1, got {self.sign}")
        if self.variable_index < 0:
            raise FormulaError("variable_index must be non-negative")

    def negate(self) -> "Literal":
        return Literal(self.variable_index, -self.sign)

    def to_dimacs(self) -> int:
        return self.sign * (self.variable_index + 1)

    @staticmethod
    def from_dimacs(code: int) -> "Literal":
        if code == 0:
            raise FormulaError("0 is not a literal")
        return Literal(abs(code) - 1, 1 if code > 0 else -1)


@dataclass(frozen=True)
class Formula:
    """A k-CNF over n variables; clauses of exactly k literals each.

    Repeated and complementary literals inside a clause are permitted (the
    uniform model draws every literal slot independently).
    """

    n: int
    k: int
    lits: np.ndarray  # (m, k) int32, DIMACS encoding

    def __post_init__(self):
        lits = np.asarray(self.lits, dtype=np.int32).reshape(-1, self.k)
        if self.n < 0 or self.k < 1:
            raise FormulaError(f"invalid n={self.n}, k={self.k}")
        if lits.size:
            if np.any(lits == 0):
                raise FormulaError("literal code 0 is not allowed")
            if int(np.abs(lits).max()) > self.n:
                raise FormulaError("literal references a variable >= n")
        lits.setflags(write=False)
        object.__setattr__(self, "lits", lits)

    @property
    def m(self) -> int:
        return self.lits.shape[0]

    @property
    def clauses(self) -> tuple:
        return tuple(
            tuple(Literal.from_dimacs(int(c)) for c in row) for row in self.lits
        )

    @staticmethod
    def from_clauses(n: int, k: int, clauses: Iterable[Sequence[Literal]]) -> "Formula":
        rows = [[lit.to_dimacs() for lit in cl] for cl in clauses]
        for row in rows:
            if len(row) != k:
                raise FormulaError(f"clause has {len(row)} literals, expected {k}")
        arr = np.array(rows, dtype=np.int32).reshape(-1, k)
        return Formula(n, k, arr)

    @staticmethod
    def from_dimacs_rows(n: int, k: int, rows: Iterable[Sequence[int]]) -> "Formula":
        arr = np.array(list(rows), dtype=np.int32).reshape(-1, k)
        return Formula(n, k, arr)

    def literal_values(self, sigma: Assignment) -> np.ndarray:
        """(m, k) boolean array: truth value of each literal slot under sigma."""
        sigma = np.asarray(sigma, dtype=np.uint8)
        var = np.abs(self.lits) - 1
        vals = sigma[var].astype(bool)
        return np.where(self.lits > 0, vals, ~vals)

    def is_satisfied_by(self, sigma: Assignment) -> bool:
        if self.m == 0:
            return True
        return bool(self.literal_values(sigma).any(axis=1).all())


@dataclass(frozen=True)
class SignedDegreeSequence:
    """Per-variable positive/negative occurrence counts with total k*m."""

    k: int
    m: int
    d_pos: np.ndarray  # (n,) int64
    d_neg: np.ndarray  # (n,) int64

    def __post_init__(self):
        d_pos = np.asarray(self.d_pos, dtype=np.int64)
        d_neg = np.asarray(self.d_neg, dtype=np.int64)
        if d_pos.shape != d_neg.shape or d_pos.ndim != 1:
            raise FormulaError("d_pos and d_neg must be 1-d arrays of equal length")
        if np.any(d_pos < 0) or np.any(d_neg < 0):
            raise FormulaError("degrees must be non-negative")
        total = int(d_pos.sum() + d_neg.sum())
        if total != self.k * self.m:
            raise FormulaError(
                f"degree total {total} does not match k*m = {self.k * self.m}"
            )
        d_pos.setflags(write=False)
        d_neg.setflags(write=False)
        object.__setattr__(self, "d_pos", d_pos)
        object.__setattr__(self, "d_neg", d_neg)

    @property
    def n(self) -> int:
        return self.d_pos.shape[0]

    @property
    def km(self) -> int:
        return self.k * self.m

    def imbalance(self) -> np.ndarray:
        """d_x - d_neg_x per variable."""
        return self.d_pos - self.d_neg

    def degree_pairs(self) -> list:
        return list(zip(self.d_pos.tolist(), self.d_neg.tolist()))


def degree_sequence_of(formula: Formula) -> SignedDegreeSequence:
    """Count literal occurrences of the formula, with multiplicity."""
    d_pos = np.zeros(formula.n, dtype=np.int64)
    d_neg = np.zeros(formula.n, dtype=np.int64)
    if formula.m:
        flat = formula.lits.ravel()
        pos = flat[flat > 0] - 1
        neg = -flat[flat < 0] - 1
        np.add.at(d_pos, pos, 1)
        np.add.at(d_neg, neg, 1)
    return SignedDegreeSequence(formula.k, formula.m, d_pos, d_neg)


def type_value(z: int, k: int) -> Fraction:
    """The dyadic type value 1/2 + z / 2**(k+1), clamped to [0, 1].

    At small clause widths the imbalance cutoff is vacuous and the affine
    rule can leave the unit interval; clamping keeps the map a probability
    and preserves the symmetry value(-z) = 1 - value(z)."""
    v = Fraction(1, 2) + Fraction(int(z), 1 << (k + 1))
    return min(max(v, Fraction(0)), Fraction(1))


def type_cutoff(k: int) -> float:
    """Imbalance cutoff 10 * sqrt(k * 2**k * ln k) beyond which a literal
    is treated as perfectly balanced."""
    return 10.0 * math.sqrt(k * (2.0**k) * math.log(k))


@dataclass(frozen=True)
class TypeTable:
    """Literal-type map for a signed degree sequence.

    ``var_z[x]`` is the type numerator of the positive literal of variable
    ``x`` (the negative literal has numerator ``-var_z[x]``); ``good[x]``
    records whether the signature of x passed the refinement that assigns
    heavily unbalanced or over-degreed variables the neutral type 1/2.
    """

    k: int
    m: int
    n: int
    var_z: np.ndarray  # (n,) int64 type numerator of the positive literal
    good: np.ndarray  # (n,) bool
    d_pos: np.ndarray
    d_neg: np.ndarray
    mass: dict = field(repr=False)  # z -> integer occurrence count
    n_of: dict = field(repr=False)  # z -> number of variables of that type

    @property
    def km(self) -> int:
        return self.k * self.m

    @property
    def type_set(self) -> tuple:
        """All type numerators, closed under negation."""
        zs = set(self.mass)
        zs.update(-z for z in self.mass)
        return tuple(sorted(zs))

    def value(self, z: int) -> Fraction:
        return type_value(z, self.k)

    @property
    def pi(self) -> dict:
        """Occurrence-mass fraction per type, an exact Fraction summing to 1."""
        km = self.km
        out = {z: Fraction(self.mass.get(z, 0), km) for z in self.type_set}
        return out

    def literal_z(self, lit: Literal) -> int:
        return int(self.var_z[lit.variable_index]) * lit.sign

    def clause_z(self, dimacs_row: np.ndarray) -> ClauseType:
        var = np.abs(dimacs_row) - 1
        z = self.var_z[var] * np.sign(dimacs_row)
        return tuple(int(v) for v in z)

    def clause_type_values(self, ell: ClauseType) -> tuple:
        return tuple(self.value(z) for z in ell)


def good_signature(d_pos: int, d_neg: int, k: int, m: int, n: int) -> bool:
    """Whether the variable keeps its own marginal type.

    Requires both degrees below 3*k*r/4 (r = m/n) and a nonzero squared
    imbalance at most 100 * k * 2**k * ln k (the type-map cutoff).
    """
    # 4*n*d < 3*k*m avoids float division in the degree bound
    if not (4 * n * d_pos < 3 * k * m and 4 * n * d_neg < 3 * k * m):
        return False
    z = d_pos - d_neg
    if z == 0:
        return False
    return z * z <= 100.0 * k * (2.0**k) * math.log(k)


def build_type_table(
    d: SignedDegreeSequence, good_refinement: bool = True
) -> TypeTable:
    """Map every literal to its type given the degree sequence.

    With ``good_refinement`` (the default and the authoritative definition),
    variables whose signature is not good are assigned the neutral type 1/2.
    Without it the raw cutoff map is applied to every variable.
    """
    if d.km == 0:
        raise FormulaError("degree sequence has no occurrence mass (k*m = 0)")
    k, m, n = d.k, d.m, d.n
    z = d.imbalance().copy()
    cutoff_sq = 100.0 * k * (2.0**k) * math.log(k)
    within = (z.astype(np.float64) ** 2) <= cutoff_sq
    if good_refinement:
        deg_ok = (4 * n * d.d_pos < 3 * k * m) & (4 * n * d.d_neg < 3 * k * m)
        good = within & deg_ok & (z != 0)
    else:
        good = within & (z != 0)
    z[~good] = 0

    mass = Counter()
    n_of = Counter()
    for zi, dp, dn in zip(z.tolist(), d.d_pos.tolist(), d.d_neg.tolist()):
        mass[zi] += dp
        mass[-zi] += dn
        n_of[zi] += 1
    good.setflags(write=False)
    z.setflags(write=False)
    return TypeTable(
        k=k,
        m=m,
        n=n,
        var_z=z,
        good=good,
        d_pos=d.d_pos,
        d_neg=d.d_neg,
        mass=dict(mass),
        n_of=dict(n_of),
    )


@dataclass(frozen=True)
class ClauseTypeCounts:
    """Number of clauses per clause type (k-tuple of type numerators)."""

    k: int
    counts: dict  # ClauseType -> int

    @property
    def m(self) -> int:
        return sum(self.counts.values())

    def items(self):
        return self.counts.items()


def clause_type_counts(formula: Formula, table: TypeTable) -> ClauseTypeCounts:
    """Classify each clause of the formula under the table's literal types."""
    if formula.n != table.n or formula.k != table.k:
        raise FormulaError("type table does not match the formula dimensions")
    counts = Counter()
    if formula.m:
        var = np.abs(formula.lits) - 1
        zmat = table.var_z[var] * np.sign(formula.lits)
        for row in zmat:
            counts[tuple(int(v) for v in row)] += 1
    return ClauseTypeCounts(formula.k, dict(counts))


def type_slot_demand(counts: ClauseTypeCounts) -> Counter:
    """Per-type number of clause slots requested by a clause-type vector."""
    demand = Counter()
    for ell, cnt in counts.items():
        for z in ell:
            demand[z] += cnt
    return demand


# ---------------------------------------------------------------------------
# DIMACS CNF I/O
# ---------------------------------------------------------------------------


def emit_dimacs(formula: Formula) -> str:
    """Standard DIMACS CNF text; a 'c k <k>' comment pins the clause width
    so that empty formulas round-trip."""
    lines = [f"c k {formula.k}", f"p cnf {formula.n} {formula.m}"]
    for row in formula.lits:
        lines.append(" ".join(str(int(c)) for c in row) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str, k: int | None = None) -> Formula:
    """Parse DIMACS CNF text, preserving clause and literal order exactly."""
    n = None
    m = None
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 3 and parts[1] == "k":
                k = int(parts[2])
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormulaError(f"invalid problem line: {line!r}")
            n, m = int(parts[2]), int(parts[3])
            continue
        codes = [int(x) for x in line.split()]
        if not codes or codes[-1] != 0:
            raise FormulaError(f"clause not 0-terminated: {line!r}")
        rows.append(codes[:-1])
    if n is None:
        raise FormulaError("missing 'p cnf' header")
    if rows:
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise FormulaError(f"mixed clause widths {sorted(widths)}")
        width = widths.pop()
        if k is None:
            k = width
        elif k != width:
            raise FormulaError(f"clause width {width} does not match k={k}")
    elif k is None:
        raise FormulaError("empty formula without a 'c k' comment; pass k explicitly")
    if m is not None and m != len(rows):
        raise FormulaError(f"header announces m={m} but {len(rows)} clauses found")
    return Formula.from_dimacs_rows(n, k, rows)


def write_dimacs(path, formula: Formula) -> None:
    with open(path, "w") as fh:
        fh.write(emit_dimacs(formula))


def read_dimacs(path, k: int | None = None) -> Formula:
    with open(path) as fh:
        return parse_dimacs(fh.read(), k=k)


# ---------------------------------------------------------------------------
# Degree-sequence text format: header "k m n", then one line per variable
# "index d_pos d_neg".
# ---------------------------------------------------------------------------


def emit_degree_sequence(d: SignedDegreeSequence) -> str:
    lines = [f"{d.k} {d.m} {d.n}"]
    for i in range(d.n):
        lines.append(f"{i} {int(d.d_pos[i])} {int(d.d_neg[i])}")
    return "\n".join(lines) + "\n"


def parse_degree_sequence(text: str) -> SignedDegreeSequence:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormulaError("empty degree-sequence text")
    header = lines[0].split()
    if len(header) != 3:
        raise FormulaError("header must be 'k m n'")
    k, m, n = (int(x) for x in header)
    d_pos = np.zeros(n, dtype=np.int64)
    d_neg = np.zeros(n, dtype=np.int64)
    if len(lines) - 1 != n:
        raise FormulaError(f"expected {n} variable lines, found {len(lines) - 1}")
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise FormulaError(f"invalid degree line: {ln!r}")
        i, dp, dn = (int(x) for x in parts)
        d_pos[i] = dp
        d_neg[i] = dn
    return SignedDegreeSequence(k, m, d_pos, d_neg)


def write_degree_sequence(path, d: SignedDegreeSequence) -> None:
    with open(path, "w") as fh:
        fh.write(emit_degree_sequence(d))


def read_degree_sequence(path) -> SignedDegreeSequence:
    with open(path) as fh:
        return parse_degree_sequence(fh.read())
