"""Marginal map, majority vote, majority weight, and assignment predicates.

The map ``p_bp`` prescribes, per variable, the probability of being set true
as a function of its occurrence imbalance.  The predicates below test whether
a concrete assignment realizes those prescriptions on a concrete formula
(up to one occurrence of integer slack per class, the integer shadow of the
O(1/n) tolerance used in the asymptotic definitions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    Assignment,
    Formula,
    FormulaError,
    SignedDegreeSequence,
    TypeTable,
    type_cutoff,
    type_value,
)


def p_bp(z: int, k: int) -> Fraction:
    """Prescribed true-probability for a literal with occurrence imbalance z:
    1/2 + z/2**(k+1) inside the cutoff 10*sqrt(k*2^k*ln k), else exactly 1/2.
    Clamped to [0, 1] at small k where the cutoff is vacuous (see
    ``core.type_value``).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if z * z <= 100.0 * k * (2.0**k) * math.log(k):
        return type_value(z, k)
    return Fraction(1, 2)


@dataclass(frozen=True)
class MarginalMap:
    """The imbalance -> probability rule for a fixed clause width k."""

    k: int

    @property
    def cutoff(self) -> float:
        return type_cutoff(self.k)

    def __call__(self, z: int) -> Fraction:
        return p_bp(z, self.k)


def bp_conjectured_marginal(d_x: int, d_neg_x: int, k: int) -> Fraction:
    """Leading-order conjectured marginal 1/2 + (d_x - d_neg_x)/2**(k+1),
    clamped to [0, 1].  A comparison target, not claimed exact."""
    v = Fraction(1, 2) + Fraction(d_x - d_neg_x, 1 << (k + 1))
    return min(max(v, Fraction(0)), Fraction(1))


def majority_vote(d: SignedDegreeSequence) -> Assignment:
    """sigma(x) = 1 iff d_x > d_neg_x; ties go to false."""
    return (d.d_pos > d.d_neg).astype(np.uint8)


def majority_weight(d: SignedDegreeSequence) -> Fraction:
    """Fraction of literal occurrences agreeing with the majority vote."""
    if d.km == 0:
        raise FormulaError("majority weight undefined for k*m = 0")
    top = int(np.maximum(d.d_pos, d.d_neg).sum())
    return Fraction(top, d.km)


def sigma_skew(d: SignedDegreeSequence, table: TypeTable) -> Fraction:
    """(1/km) * sum_x (1 - 2 p(x)) (d_x - d_neg_x), an exact rational."""
    if d.km == 0:
        raise FormulaError("skew undefined for k*m = 0")
    total = Fraction(0)
    for z, dp, dn in zip(table.var_z.tolist(), d.d_pos.tolist(), d.d_neg.tolist()):
        total += (1 - 2 * table.value(z)) * (dp - dn)
    return total / d.km


def true_occurrence_count(sigma: Assignment, formula: Formula) -> int:
    """Number of literal occurrences (with multiplicity) true under sigma."""
    if formula.m == 0:
        return 0
    return int(formula.literal_values(sigma).sum())


def is_balanced(sigma: Assignment, formula: Formula, slack: int = 1) -> bool:
    """Exactly half (within +-slack) of all literal occurrences are true."""
    t = true_occurrence_count(sigma, formula)
    km = formula.k * formula.m
    return abs(2 * t - km) <= 2 * slack


def has_p_marginals(
    sigma: Assignment,
    d: SignedDegreeSequence,
    table: TypeTable,
    slack: int = 1,
) -> bool:
    """Per good signature class, the true occurrence mass matches the class
    type times the class mass; the pooled neutral-type mass is exactly half.
    Each class tolerates at most ``slack`` occurrences of deviation.
    """
    sigma = np.asarray(sigma, dtype=np.uint8)
    # signature classes: (sign, d_pos, d_neg) over good variables
    classes: dict[tuple, list] = {}
    neutral_mass = 0
    neutral_true = 0
    for x in range(d.n):
        dp = int(d.d_pos[x])
        dn = int(d.d_neg[x])
        sx = int(sigma[x])
        if table.good[x]:
            key_pos = (1, dp, dn)
            key_neg = (-1, dp, dn)
            for key, occ, tr in (
                (key_pos, dp, dp * sx),
                (key_neg, dn, dn * (1 - sx)),
            ):
                mass, true = classes.get(key, (0, 0))
                classes[key] = (mass + occ, true + tr)
        else:
            neutral_mass += dp + dn
            neutral_true += dp * sx + dn * (1 - sx)
    for (sign, dp, dn), (mass, true) in classes.items():
        z = (dp - dn) * sign
        target = table.value(z) * mass
        if abs(Fraction(true) - target) > slack:
            return False
    return abs(Fraction(2 * neutral_true - neutral_mass, 2)) <= slack


def is_judicious(
    sigma: Assignment,
    formula: Formula,
    table: TypeTable,
    slack: int = 1,
) -> bool:
    """Per (clause type, position), the number of true literals among the
    clauses of that type is m(ell) * ell_j up to ``slack``."""
    if formula.m == 0:
        return True
    sigma = np.asarray(sigma, dtype=np.uint8)
    vals = formula.literal_values(sigma)
    var = np.abs(formula.lits) - 1
    zmat = table.var_z[var] * np.sign(formula.lits)
    groups: dict[tuple, list] = {}
    for row_z, row_v in zip(zmat, vals):
        key = tuple(int(v) for v in row_z)
        cnt, tr = groups.get(key, (0, None))
        if tr is None:
            tr = np.zeros(formula.k, dtype=np.int64)
        groups[key] = (cnt + 1, tr + row_v)
    for ell, (m_ell, true_by_pos) in groups.items():
        for j, z in enumerate(ell):
            target = table.value(z) * m_ell
            if abs(Fraction(int(true_by_pos[j])) - target) > slack:
                return False
    return True
