import math

import numpy as np
import pytest

from ksatlab import bounds, core, moments
from ksatlab.moments import InfeasibleOmegaError

from conftest import balanced_table, typical_two_type_table

LN2 = math.log(2.0)


class TestEntropy:
    def test_half_is_ln2(self):
        assert moments.entropy(0.5) == pytest.approx(LN2, abs=1e-15)

    def test_boundaries(self):
        assert moments.entropy(0.0) == 0.0
        assert moments.entropy(1.0) == 0.0

    def test_quarter(self):
        # -0.25 ln 0.25 - 0.75 ln 0.75, evaluated independently
        ref = 0.25 * math.log(4.0) + 0.75 * math.log(4.0 / 3.0)
        assert moments.entropy(0.25) == pytest.approx(ref, rel=1e-14)
        assert moments.entropy(0.25) == pytest.approx(0.5623351446188083, abs=1e-12)

    def test_concave_max_at_half(self):
        grid = np.linspace(0.01, 0.99, 99)
        vals = moments.entropy(grid)
        assert vals.max() <= LN2 + 1e-12
        assert abs(grid[np.argmax(vals)] - 0.5) < 0.02

    def test_domain(self):
        with pytest.raises(ValueError):
            moments.entropy(1.5)


class TestBinomRate:
    def test_zero_at_equal(self):
        assert moments.binom_rate(0.3, 0.3) == 0.0

    def test_half_quarter(self):
        # psi(1/2, 1/4) = -(1/4) ln(1/2) - (3/4) ln(3/2), evaluated directly
        ref = -(0.25 * math.log(0.5) + 0.75 * math.log(1.5))
        assert moments.binom_rate(0.5, 0.25) == pytest.approx(ref, abs=1e-15)
        assert moments.binom_rate(0.5, 0.25) == pytest.approx(
            -0.1308120359411370, abs=1e-12
        )

    def test_nonpositive(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p, q = rng.uniform(0.01, 0.99, 2)
            val = moments.binom_rate(p, q)
            assert val <= 1e-15
            if abs(p - q) > 1e-3:
                assert val < 0

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            moments.binom_rate(0.0, 0.5)
        with pytest.raises(ValueError):
            moments.binom_rate(0.5, 1.0)

    def test_matches_exact_binomial_tail(self):
        # P[Bin(1000, 1/2) = 250] against exp(n psi) with the sharp
        # 1/sqrt(2 pi n q (1-q)) prefactor, via log-gamma
        n, q, p = 1000, 0.25, 0.5
        log_exact = (
            math.lgamma(n + 1)
            - math.lgamma(n * q + 1)
            - math.lgamma(n * (1 - q) + 1)
            + n * math.log(p)
        )
        log_approx = n * moments.binom_rate(p, q) - 0.5 * math.log(
            2 * math.pi * n * q * (1 - q)
        )
        assert abs(log_exact - log_approx) < math.log(2)


class TestOffdiag:
    def test_point_value_k20(self):
        r = 2**20 * LN2 - 1.5 * LN2
        # independent evaluation of ln2 + h + q
        x = 0.25
        h = -(x * math.log(x) + (1 - x) * math.log(1 - x))
        qx = r * math.log(1 - 2.0 ** (1 - 20) + 2.0**-20 * (1 - x) ** 20)
        ref = LN2 + h + qx
        # the plain-log reference loses ~1e-11 to cancellation; the
        # implementation uses log1p
        assert moments.offdiag_exponent(0.25, 20, r) == pytest.approx(ref, abs=1e-9)
        assert ref == pytest.approx(-0.12861, abs=1e-4)

    def test_h_symmetry(self):
        r = bounds.r_bp(12)
        for x in (0.3, 0.41):
            hx = moments.offdiag_exponent(x, 12, r) - moments.offdiag_exponent(
                1 - x, 12, r
            )
            # h is symmetric; the difference is q(x) - q(1-x)
            qdiff = r * (
                math.log(1 - 2.0**-11 + 2.0**-12 * (1 - x) ** 12)
                - math.log(1 - 2.0**-11 + 2.0**-12 * x**12)
            )
            assert hx == pytest.approx(qdiff, rel=1e-10)

    def test_q_strictly_decreasing(self):
        k, r = 12, bounds.r_bp(12)
        grid = np.linspace(0.01, 0.99, 200)
        q = r * np.log1p(-(2.0 ** (1 - k)) + 2.0**-k * (1 - grid) ** k)
        assert np.all(np.diff(q) <= 0)
        # strict where the decay still resolves in float64
        low = grid[grid < 0.6]
        qlow = r * np.log1p(-(2.0 ** (1 - k)) + 2.0**-k * (1 - low) ** k)
        assert np.all(np.diff(qlow) < 0)
        # analytic derivative -k r (1-x)^(k-1) / (2^k - 2 + (1-x)^k) < 0
        deriv = -k * r * (1 - grid) ** (k - 1) / (2.0**k - 2 + (1 - grid) ** k)
        assert np.all(deriv < 0)

    def test_sweeps_pass_at_bp_density(self):
        for k in (12, 16, 20):
            rep = moments.verify_offdiag(k, bounds.r_bp(k), grid_size=20_000)
            assert rep.all_negative
            assert rep.n_points >= 20_000

    def test_k8_band_is_empty(self):
        # xi = 8 * 2^-4 = 1/2 leaves both segments empty: vacuous pass
        rep = moments.verify_offdiag(8, bounds.r_bp(8), grid_size=1000)
        assert rep.segments == ()
        assert rep.all_negative

    def test_boundary_value_small_but_negative(self):
        k = 20
        xi = k * 2.0 ** (-k / 2.0)
        val = moments.offdiag_exponent(0.5 - xi, k, bounds.r_bp(k))
        assert val < 0
        assert abs(val) <= 5 * xi**2

    def test_upper_density_boundary(self):
        rep = moments.verify_offdiag(25, 2**25 * LN2, grid_size=20_000)
        assert rep.all_negative

    def test_left_endpoint_negative_from_k8(self):
        # the value at x = k 2^-k stays negative at the BP density even where
        # the sweep band is empty
        for k in (8, 10, 12, 16, 20):
            assert moments.offdiag_exponent(k * 2.0**-k, k, bounds.r_bp(k)) < 0

    def test_failure_is_reported(self):
        rep = moments.verify_offdiag(12, 0.0, grid_size=1000)
        assert not rep.all_negative
        assert rep.max_value > 0
        assert 0 < rep.argmax_x < 1

    def test_small_k_rejected(self):
        with pytest.raises(ValueError):
            moments.verify_offdiag(7, 100.0)


def scalar_first_moment_oracle(ell):
    """Independent route: the fixed point reduces to a scalar equation for
    P = prod(1 - q_j) via q_j = ell_j (1 - P); solve by bisection."""
    ell = np.asarray(ell, dtype=float)

    def g(p):
        return float(np.prod(1.0 - ell * (1.0 - p))) - p

    lo, hi = 0.0, 0.5
    assert g(lo) > 0 > g(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    p = 0.5 * (lo + hi)
    return ell * (1.0 - p)


class TestFirstMoment:
    def test_k3_symmetric_golden_value(self):
        sol = moments.solve_first_moment_q([0.5] * 3)
        assert np.allclose(sol.q, (3 - math.sqrt(5)) / 2, atol=1e-10)
        assert sol.residual <= 1e-12

    def test_k20_expansion(self):
        sol = moments.solve_first_moment_q([0.5] * 20)
        assert abs(sol.q[0] - (0.5 - 2.0**-21)) <= 20**3 * 2.0**-30

    def test_substitution_residual(self):
        sol = moments.solve_first_moment_q([0.45, 0.5, 0.55])
        denom = 1 - np.prod(1 - sol.q)
        assert np.max(np.abs(sol.q / denom - np.array(sol.ell))) <= 1e-12

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(7)
        for k in (3, 7, 12):
            for _ in range(5):
                ell = 0.5 + rng.uniform(-0.05, 0.05, k)
                sol = moments.solve_first_moment_q(ell, k)
                assert np.max(np.abs(sol.q - scalar_first_moment_oracle(ell))) <= 1e-10

    def test_domain_checked(self):
        with pytest.raises(ValueError):
            moments.solve_first_moment_q([0.5, 1.0, 0.5])


class TestFirstMomentExponent:
    def test_typical_moments_table_matches_closed_form(self):
        table, r_eff = typical_two_type_table(15)
        fme = moments.first_moment_exponent(table, r=r_eff)
        scaled = 2.0**15 * fme.exponent
        assert abs(scaled - (fme.rho - LN2 / 2)) <= 0.2
        assert abs(scaled - LN2) <= 0.2

    def test_gap_shrinks_with_k(self):
        gaps = {}
        for k in (15, 20):
            table, r_eff = typical_two_type_table(k)
            fme = moments.first_moment_exponent(table, r=r_eff)
            gaps[k] = abs(2.0**k * fme.exponent - (fme.rho - LN2 / 2))
        assert gaps[20] < gaps[15]

    def test_balanced_table_entropy_term(self):
        table, r_eff = balanced_table(15)
        fme = moments.first_moment_exponent(table, r=r_eff)
        assert fme.entropy_term == pytest.approx(LN2, abs=1e-14)

    def test_balanced_table_matches_balanced_reference(self):
        # a single neutral type prices in the k ln2 / 2 balance penalty; the
        # assembled exponent must track rho - ln2/2 - (k/2) ln2 instead
        table, r_eff = balanced_table(15)
        fme = moments.first_moment_exponent(table, r=r_eff)
        scaled = 2.0**15 * fme.exponent
        ref = fme.rho - LN2 / 2 - 15 * LN2 / 2
        assert abs(scaled - ref) <= 0.05

    def test_counts_path_equals_product_path_single_type(self):
        table, r_eff = balanced_table(10)
        counts = core.ClauseTypeCounts(10, {(0,) * 10: table.m})
        a = moments.first_moment_exponent(table, r=r_eff)
        b = moments.first_moment_exponent(table, counts=counts, r=r_eff)
        assert a.exponent == pytest.approx(b.exponent, rel=1e-12)

    def test_budget_guard(self):
        table, r_eff = typical_two_type_table(15)
        with pytest.raises(ValueError):
            moments.first_moment_exponent(table, r=r_eff, max_terms=3)


class TestPairSolver:
    def test_reference_row_reduces_to_first_moment(self):
        for k in (3, 5, 10, 15, 20):
            ell = [0.5] * k
            pair = moments.solve_pair_q(ell, [0.25] * k, k)
            first = moments.solve_first_moment_q(ell, k)
            assert np.max(np.abs(pair.q11 - pair.q**2)) <= 1e-10
            assert np.max(np.abs(pair.q - first.q)) <= 1e-10
            assert pair.residual <= 1e-12

    def test_k3_golden_values(self):
        pair = moments.solve_pair_q([0.5] * 3, [0.25] * 3)
        q = (3 - math.sqrt(5)) / 2
        assert np.allclose(pair.q, q, atol=1e-9)
        assert np.allclose(pair.q11, q * q, atol=1e-9)

    def test_random_rows_residuals(self):
        rng = np.random.default_rng(11)
        for k in (5, 10):
            for _ in range(10):
                ell = 0.5 + rng.uniform(-0.02, 0.02, k)
                omega = ell * ell + rng.uniform(-0.04, 0.04, k)
                sol = moments.solve_pair_q(ell, omega, k)
                assert sol.residual <= 1e-12
                assert np.all(sol.q00 > 0) and np.all(sol.q10 > -1e-12)

    def test_far_omega_rejected(self):
        with pytest.raises(InfeasibleOmegaError):
            moments.solve_pair_q([0.5] * 3, [0.45] * 3)
        with pytest.raises(InfeasibleOmegaError):
            moments.solve_pair_q([0.5] * 3, [0.25, 0.25, 1.5])


class TestPairExponent:
    def test_reference_row_identity(self):
        # at the reference row the exponent collapses to twice the
        # first-moment quantity ln(1 - (1-q)^k) - k psi(q, 1/2)
        for k in (3, 10):
            ell = [0.5] * k
            val = moments.pair_exponent(ell, [0.25] * k, k)
            q = float(moments.solve_first_moment_q(ell, k).q[0])
            ref = 2 * (math.log(1 - (1 - q) ** k) - k * moments.binom_rate(q, 0.5))
            assert val == pytest.approx(ref, abs=1e-12)

    def test_asymmetric_identity(self):
        ell = (0.48, 0.5, 0.52, 0.5)
        val = moments.pair_exponent(ell, moments.omega_star_row(ell))
        first = moments.solve_first_moment_q(ell)
        ref = 2 * (
            math.log(first.sat_probability())
            - sum(moments.binom_rate(float(q), l) for q, l in zip(first.q, ell))
        )
        assert val == pytest.approx(ref, abs=1e-11)

    def test_negative(self):
        for k in (3, 8, 12):
            assert moments.pair_exponent([0.5] * k, [0.25] * k, k) < 0

    def test_gradient_vanishes(self):
        g = moments.pair_gradient([0.5] * 10, 10, step=1e-4)
        assert np.max(np.abs(g)) <= 1e-6

    def test_hessian_bound_k10(self):
        rep = moments.check_hessian_bound([0.5] * 10, 10, step=1e-3)
        assert rep.within_bound
        assert rep.max_abs <= rep.bound

    def test_hessian_scaling(self):
        r10 = moments.check_hessian_bound([0.5] * 10, 10, step=1e-3)
        r15 = moments.check_hessian_bound([0.5] * 15, 15, step=1e-3)
        ratio = r15.max_abs / r10.max_abs
        # expected drop 4^-5 up to polylog factors
        assert 1e-4 <= ratio <= 1e-2

    def test_hessian_full_matrix_swept(self):
        rep = moments.check_hessian_bound([0.5] * 5, 5, step=1e-3)
        assert rep.matrix.shape == (5, 5)
        assert np.allclose(rep.matrix, rep.matrix.T, atol=1e-6)
