from fractions import Fraction

import numpy as np
import pytest

from ksatlab import core, gen
from ksatlab.core import Formula, FormulaError, SignedDegreeSequence


def test_degree_sequence_hand_count():
    # (x or y or z) and (x or not-y or z)
    f = Formula.from_dimacs_rows(3, 3, [[1, 2, 3], [1, -2, 3]])
    d = core.degree_sequence_of(f)
    assert d.d_pos.tolist() == [2, 1, 2]
    assert d.d_neg.tolist() == [0, 1, 0]
    assert d.km == 6


def test_degree_sequence_empty_formula():
    f = Formula.from_dimacs_rows(4, 3, [])
    d = core.degree_sequence_of(f)
    assert d.d_pos.tolist() == [0, 0, 0, 0]
    assert d.d_neg.tolist() == [0, 0, 0, 0]


def test_degree_sequence_repeated_literal_multiplicity():
    f = Formula.from_dimacs_rows(2, 3, [[1, 1, 1]])
    d = core.degree_sequence_of(f)
    assert d.d_pos.tolist() == [3, 0]
    assert d.d_neg.tolist() == [0, 0]


def test_degree_sequence_invariant_under_clause_permutation():
    rng = np.random.default_rng(0)
    for i in range(10):
        f = gen.sample_uniform(12, 30, 3, (5, i))
        perm = rng.permutation(f.m)
        g = Formula(f.n, f.k, f.lits[perm])
        dg = core.degree_sequence_of(g)
        df = core.degree_sequence_of(f)
        assert np.array_equal(dg.d_pos, df.d_pos)
        assert np.array_equal(dg.d_neg, df.d_neg)


def test_degree_sequence_total_mismatch_rejected():
    with pytest.raises(FormulaError):
        SignedDegreeSequence(3, 2, np.array([1, 1]), np.array([1, 1]))


class TestTypeTable:
    def test_balanced_single_type(self):
        d = SignedDegreeSequence(3, 4, np.array([2, 2, 2]), np.array([2, 2, 2]))
        t = core.build_type_table(d)
        assert t.type_set == (0,)
        assert t.pi == {0: Fraction(1)}
        assert t.value(0) == Fraction(1, 2)

    def test_good_variable_keeps_dyadic_type(self):
        # k=10: (9,5) has imbalance 4 within cutoff and degrees below 3kr/4
        d = SignedDegreeSequence(10, 3, np.array([9, 8]), np.array([5, 8]))
        t = core.build_type_table(d)
        assert t.good.tolist() == [True, False]
        assert t.value(int(t.var_z[0])) == Fraction(1, 2) + Fraction(4, 2**11)
        assert float(t.value(4)) == 0.501953125

    def test_huge_imbalance_maps_to_neutral(self):
        # k=10 cutoff is ~1536; an imbalance of 2000 is treated as balanced
        d = SignedDegreeSequence(10, 201, np.array([2000, 5]), np.array([0, 5]))
        t = core.build_type_table(d)
        assert int(t.var_z[0]) == 0
        assert not t.good[0]

    def test_over_degreed_variable_maps_to_neutral(self):
        # degree bound 3km/(4n): var 0 exceeds it even though the imbalance
        # is inside the cutoff
        d = SignedDegreeSequence(3, 4, np.array([12, 0]), np.array([0, 0]))
        t = core.build_type_table(d)
        assert int(t.var_z[0]) == 0
        without = core.build_type_table(d, good_refinement=False)
        assert int(without.var_z[0]) == 12

    def test_zero_mass_rejected(self):
        d = SignedDegreeSequence(3, 0, np.zeros(2, np.int64), np.zeros(2, np.int64))
        with pytest.raises(FormulaError):
            core.build_type_table(d)

    def test_pi_sums_to_one_and_masses_are_integers(self):
        for i in range(5):
            f = gen.sample_uniform(15, 40, 3, (9, i))
            t = core.build_type_table(core.degree_sequence_of(f))
            assert sum(t.pi.values()) == Fraction(1)
            assert sum(t.mass.values()) == t.km
            assert all(isinstance(v, int) for v in t.mass.values())

    def test_type_set_closed_under_negation(self):
        for i in range(5):
            f = gen.sample_uniform(15, 40, 3, (11, i))
            t = core.build_type_table(core.degree_sequence_of(f))
            zs = set(t.type_set)
            assert zs == {-z for z in zs}


class TestClauseTypeCounts:
    def test_all_balanced_single_clause_type(self):
        f = Formula.from_dimacs_rows(2, 2, [[1, 2], [-1, -2], [1, -2], [-1, 2]])
        t = core.build_type_table(core.degree_sequence_of(f))
        cc = core.clause_type_counts(f, t)
        assert cc.counts == {(0, 0): 4}

    def test_empty_formula(self):
        f = Formula.from_dimacs_rows(3, 3, [])
        d = SignedDegreeSequence(3, 1, np.array([2, 1, 0]), np.array([0, 0, 0]))
        t = core.build_type_table(d)
        # table from a different d; only shape compatibility is required here
        cc = core.ClauseTypeCounts(3, {})
        assert cc.m == 0
        assert core.clause_type_counts(f, t).counts == {}

    def test_two_distinct_types_hand_classified(self):
        # two clauses: v0 stays good (imbalance +1), v1 is over-degreed and
        # neutral, so the clause types are (1, 0) and (0, 0)
        rows = [[1, 2], [-2, -2]]
        f = Formula.from_dimacs_rows(2, 2, rows)
        d = core.degree_sequence_of(f)
        assert d.d_pos.tolist() == [1, 1] and d.d_neg.tolist() == [0, 2]
        t = core.build_type_table(d)
        assert t.good.tolist() == [True, False]
        cc = core.clause_type_counts(f, t)
        assert cc.counts == {(1, 0): 1, (0, 0): 1}
        assert cc.m == f.m

    def test_totals_match(self):
        for i in range(5):
            f = gen.sample_uniform(10, 25, 3, (13, i))
            t = core.build_type_table(core.degree_sequence_of(f))
            assert core.clause_type_counts(f, t).m == f.m


class TestDimacsIO:
    def test_round_trip_preserves_order(self):
        rows = [[3, -1, 2], [2, 2, -3], [-1, -1, -1]]
        f = Formula.from_dimacs_rows(3, 3, rows)
        g = core.parse_dimacs(core.emit_dimacs(f))
        assert np.array_equal(g.lits, f.lits)
        assert (g.n, g.k) == (f.n, f.k)

    def test_round_trip_random(self):
        for i in range(20):
            f = gen.sample_uniform(9, 20, 3, (17, i))
            g = core.parse_dimacs(core.emit_dimacs(f))
            assert np.array_equal(g.lits, f.lits)

    def test_empty_formula_round_trip(self):
        f = Formula.from_dimacs_rows(5, 3, [])
        g = core.parse_dimacs(core.emit_dimacs(f))
        assert g.m == 0 and g.k == 3 and g.n == 5

    def test_header_required(self):
        with pytest.raises(FormulaError):
            core.parse_dimacs("1 2 3 0\n")

    def test_mixed_widths_rejected(self):
        text = "p cnf 3 2\n1 2 3 0\n1 2 0\n"
        with pytest.raises(FormulaError):
            core.parse_dimacs(text)

    def test_file_round_trip(self, tmp_path):
        f = gen.sample_uniform(8, 15, 3, 23)
        path = tmp_path / "f.cnf"
        core.write_dimacs(path, f)
        g = core.read_dimacs(path)
        assert np.array_equal(g.lits, f.lits)


class TestDegreeSequenceIO:
    def test_round_trip(self):
        d = SignedDegreeSequence(3, 3, np.array([4, 0, 3]), np.array([1, 1, 0]))
        e = core.parse_degree_sequence(core.emit_degree_sequence(d))
        assert (e.k, e.m) == (3, 3)
        assert np.array_equal(e.d_pos, d.d_pos)
        assert np.array_equal(e.d_neg, d.d_neg)

    def test_file_round_trip(self, tmp_path):
        d = gen.sample_degree_sequence(10, 20, 3, 31)
        path = tmp_path / "d.txt"
        core.write_degree_sequence(path, d)
        e = core.read_degree_sequence(path)
        assert np.array_equal(e.d_pos, d.d_pos)
        assert np.array_equal(e.d_neg, d.d_neg)

    def test_header_shape(self):
        with pytest.raises(FormulaError):
            core.parse_degree_sequence("3 3\n0 1 2\n")


def test_literal_helpers():
    lit = core.Literal(4, -1)
    assert lit.to_dimacs() == -5
    assert core.Literal.from_dimacs(-5) == lit
    assert lit.negate().sign == 1
    with pytest.raises(FormulaError):
        core.Literal(0, 2)
    with pytest.raises(FormulaError):
        core.Literal.from_dimacs(0)


def test_formula_validation():
    with pytest.raises(FormulaError):
        Formula.from_dimacs_rows(2, 3, [[1, 2, 3]])  # variable 3 out of range
    with pytest.raises(FormulaError):
        Formula.from_dimacs_rows(3, 3, [[1, 2, 0]])  # zero literal


def test_type_value_clamped_at_small_k():
    assert core.type_value(30, 3) == Fraction(1)
    assert core.type_value(-30, 3) == Fraction(0)
    assert core.type_value(4, 3) == Fraction(3, 4)
