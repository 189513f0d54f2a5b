"""First- and second-moment numerics.

Rate functions (entropy, binomial rate), the tilted fixed-point systems that
make conditioned slot expectations match the prescribed type values, the
assembled first-moment exponent, the pair ("second moment") exponent with
finite-difference stationarity and curvature checks, and the off-diagonal
negativity sweep.

All solvers are damped Newton iterations (step halving on residual increase)
started at the zeroth-order values, with residuals verified by substitution.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .core import ClauseTypeCounts, TypeTable

LN2 = math.log(2.0)


class SolverError(RuntimeError):
    """Newton iteration failed to reach the residual target."""


class InfeasibleOmegaError(ValueError):
    """Overlap row outside the solvable neighbourhood of the reference point."""


# ---------------------------------------------------------------------------
# Rate functions
# ---------------------------------------------------------------------------


def entropy(z):
    """chi(z) = -z ln z - (1-z) ln(1-z), with boundary limits 0."""
    z = np.asarray(z, dtype=np.float64)
    if np.any(z < 0) or np.any(z > 1):
        raise ValueError("entropy argument must lie in [0, 1]")
    out = -xlogy(z, z) - xlogy(1.0 - z, 1.0 - z)
    return float(out) if out.ndim == 0 else out


def binom_rate(p: float, q: float) -> float:
    """psi(p, q) = -q ln(q/p) - (1-q) ln((1-q)/(1-p)): the exponential decay
    rate of P[Bin(n, p) = q n].  Nonpositive, zero iff p = q."""
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise ValueError("binom_rate requires p, q in the open interval (0, 1)")
    return -(q * math.log(q / p)) - (1.0 - q) * math.log((1.0 - q) / (1.0 - p))


def offdiag_exponent(x, k: int, r: float):
    """ln2 + h(x) + q(x) with h the entropy and
    q(x) = r * ln(1 - 2^(1-k) + 2^-k (1-x)^k)."""
    x = np.asarray(x, dtype=np.float64)
    h = -xlogy(x, x) - xlogy(1.0 - x, 1.0 - x)
    qx = r * np.log1p(-(2.0 ** (1 - k)) + (2.0**-k) * (1.0 - x) ** k)
    out = LN2 + h + qx
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OffdiagReport:
    k: int
    r: float
    xi: float
    segments: tuple  # ((lo, hi, npoints), ...)
    n_points: int
    max_value: float
    argmax_x: float
    all_negative: bool


def verify_offdiag(k: int, r: float, grid_size: int = 100_000) -> OffdiagReport:
    """Sweep ln2 + h + q over [k 2^-k, 1/2 - xi] and [1/2 + xi, 1 - 1e-6]
    with xi = k 2^(-k/2); endpoints included.  Degenerate (empty) segments are
    skipped, which makes small k vacuous."""
    if k < 8:
        raise ValueError("off-diagonal sweep needs k >= 8")
    xi = k * 2.0 ** (-k / 2.0)
    raw = [(k * 2.0**-k, 0.5 - xi), (0.5 + xi, 1.0 - 1e-6)]
    segments = [(lo, hi) for lo, hi in raw if lo <= hi]
    total_len = sum(hi - lo for lo, hi in segments)
    xs = []
    seg_meta = []
    for lo, hi in segments:
        npts = 2
        if total_len > 0:
            npts = max(2, int(round(grid_size * (hi - lo) / total_len)))
        xs.append(np.linspace(lo, hi, npts))
        seg_meta.append((lo, hi, npts))
    if not xs:
        return OffdiagReport(k, r, xi, (), 0, -math.inf, math.nan, True)
    grid = np.concatenate(xs)
    vals = offdiag_exponent(grid, k, r)
    imax = int(np.argmax(vals))
    return OffdiagReport(
        k=k,
        r=r,
        xi=xi,
        segments=tuple(seg_meta),
        n_points=int(grid.size),
        max_value=float(vals[imax]),
        argmax_x=float(grid[imax]),
        all_negative=bool(vals[imax] < 0.0),
    )


# ---------------------------------------------------------------------------
# Damped Newton on a generic square system
# ---------------------------------------------------------------------------


def _newton_system(fun, x0, tol=1e-13, max_iter=200, fd_scale=1e-7):
    """Solve fun(x) = 0 with damped Newton and a central finite-difference
    Jacobian.  fun may return None to flag an out-of-domain point."""
    x = np.array(x0, dtype=np.float64)
    res = fun(x)
    if res is None:
        raise SolverError("starting point outside the solver domain")
    best = float(np.max(np.abs(res)))
    for _ in range(max_iter):
        if best <= tol:
            return x, best
        dim = x.size
        jac = np.empty((dim, dim))
        for j in range(dim):
            h = fd_scale * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            xm = x.copy()
            xm[j] -= h
            rp = fun(xp)
            rm = fun(xm)
            if rp is None or rm is None:
                raise SolverError(
                    "iterate reached the domain boundary; the fixed point for "
                    "this type row may be degenerate (e.g. symmetric k = 2 "
                    "rows push q to 0)"
                )
            jac[:, j] = (rp - rm) / (2.0 * h)
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular Jacobian: {exc}") from exc
        lam = 1.0
        for _ in range(60):
            xn = x - lam * step
            rn = fun(xn)
            if rn is not None:
                cand = float(np.max(np.abs(rn)))
                if cand < best:
                    x, res, best = xn, rn, cand
                    break
            lam *= 0.5
        else:
            raise SolverError(f"damping stalled at residual {best:.3e}")
    if best <= tol:
        return x, best
    raise SolverError(f"no convergence after {max_iter} iterations ({best:.3e})")


# ---------------------------------------------------------------------------
# First-moment fixed point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FirstMomentSolution:
    ell: tuple
    k: int
    q: np.ndarray
    residual: float

    def sat_probability(self) -> float:
        """1 - prod(1 - q_j): probability a clause of this type is satisfied
        under independent slot values."""
        return float(1.0 - np.prod(1.0 - self.q))


def solve_first_moment_q(ell, k: int | None = None, tol: float = 1e-13) -> FirstMomentSolution:
    """Find q with q_j / (1 - prod(1 - q_h)) = ell_j for all j.

    This makes the slot expectation conditioned on the clause being satisfied
    match the prescribed type value.  Newton from the start q = ell.
    """
    ell_arr = np.asarray(ell, dtype=np.float64)
    if k is None:
        k = ell_arr.size
    if ell_arr.size != k:
        raise ValueError("clause type length must equal k")
    if np.any(ell_arr <= 0.0) or np.any(ell_arr >= 1.0):
        raise ValueError("type entries must lie in (0, 1)")

    def residual(q):
        if np.any(q <= 0.0) or np.any(q >= 1.0):
            return None
        denom = 1.0 - np.prod(1.0 - q)
        if denom <= 0.0:
            return None
        return q / denom - ell_arr

    q, res = _newton_system(residual, ell_arr, tol=tol)
    return FirstMomentSolution(tuple(float(v) for v in ell_arr), k, q, res)


@dataclass(frozen=True)
class FirstMomentExponent:
    k: int
    r: float
    rho: float
    entropy_term: float
    ln_s_term: float
    ln_b_term: float
    exponent: float
    closed_form_reference: float
    per_type: dict = field(repr=False)


def _multiset_weights(table: TypeTable, k: int, r: float, max_terms: int):
    """Product-form clause-type weights r * multinomial * prod pi(t),
    grouped by type multiset (the fixed point is permutation-symmetric)."""
    pis = {z: float(frac) for z, frac in table.pi.items() if frac > 0}
    types = sorted(pis)
    n_multisets = math.comb(len(types) + k - 1, k)
    if n_multisets > max_terms:
        raise ValueError(
            f"{n_multisets} type multisets exceed the enumeration budget "
            f"{max_terms}; supply realized clause-type counts instead"
        )
    for combo in itertools.combinations_with_replacement(types, k):
        mult = math.factorial(k)
        for _, grp in itertools.groupby(combo):
            mult //= math.factorial(len(tuple(grp)))
        weight = r * mult * math.prod(pis[z] for z in combo)
        yield combo, weight


def first_moment_exponent(
    table: TypeTable,
    counts: ClauseTypeCounts | None = None,
    r: float | None = None,
    max_terms: int = 200_000,
) -> FirstMomentExponent:
    """Assemble (1/n) ln E[#judicious satisfying assignments]:

        entropy term    (1/n) sum_x chi(p(x))
      + sat term        sum_ell gamma_ell ln(1 - prod_j (1 - q_ell_j))
      - slot-count term sum_ell gamma_ell sum_j psi(q_ell_j, ell_j)

    with gamma_ell = m(ell)/n when realized counts are given, else the
    product form r * prod_j pi(ell_j) summed over the full type space.
    The closed-form reference 2^-k (rho - ln2/2), rho = 2^k ln2 - r, is the
    large-k target for tables with typical moments.
    """
    k = table.k
    if r is None:
        r = table.m / table.n
    rho = (2.0**k) * LN2 - r

    entropy_term = 0.0
    for z, cnt in table.n_of.items():
        entropy_term += cnt * entropy(float(table.value(z)))
    entropy_term /= table.n

    weights: dict[tuple, float] = {}
    if counts is not None:
        for ell, m_ell in counts.items():
            key = tuple(sorted(ell))
            weights[key] = weights.get(key, 0.0) + m_ell / table.n
    else:
        for key, w in _multiset_weights(table, k, r, max_terms):
            weights[key] = weights.get(key, 0.0) + w

    ln_s = 0.0
    ln_b = 0.0
    per_type = {}
    for ell_key, weight in weights.items():
        ell_vals = tuple(float(table.value(z)) for z in ell_key)
        sol = solve_first_moment_q(ell_vals, k)
        ln_sat = math.log(sol.sat_probability())
        psi_sum = sum(
            binom_rate(float(qj), lj) for qj, lj in zip(sol.q, sol.ell)
        )
        ln_s += weight * ln_sat
        ln_b += weight * psi_sum
        per_type[ell_key] = {
            "weight": weight,
            "q": sol.q.tolist(),
            "residual": sol.residual,
        }
    exponent = entropy_term + ln_s - ln_b
    return FirstMomentExponent(
        k=k,
        r=r,
        rho=rho,
        entropy_term=entropy_term,
        ln_s_term=ln_s,
        ln_b_term=ln_b,
        exponent=exponent,
        closed_form_reference=(2.0**-k) * (rho - LN2 / 2.0),
        per_type=per_type,
    )


# ---------------------------------------------------------------------------
# Pair (second-moment) fixed point and exponent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairMomentSolution:
    ell: tuple
    omega: tuple
    k: int
    q: np.ndarray
    q11: np.ndarray
    residual: float

    @property
    def q10(self) -> np.ndarray:
        return self.q - self.q11

    @property
    def q00(self) -> np.ndarray:
        return 1.0 - 2.0 * self.q + self.q11

    def doubly_sat_probability(self) -> float:
        """1 - 2 prod(1-q_j) + prod(1-2q_j+q11_j): probability that a clause
        holds under both assignments of the pair."""
        return float(
            1.0 - 2.0 * np.prod(1.0 - self.q) + np.prod(1.0 - 2.0 * self.q + self.q11)
        )


def omega_star_row(ell) -> np.ndarray:
    """Reference overlap row ell_j^2."""
    ell = np.asarray(ell, dtype=np.float64)
    return ell * ell


def solve_pair_q(
    ell,
    omega,
    k: int | None = None,
    tol: float = 1e-13,
    omega_window: float = 0.1,
) -> PairMomentSolution:
    """Solve the coupled pair system

        ell_j   = (q_j - (q_j - q11_j) prod_{h != j}(1 - q_h)) / D
        omega_j = q11_j / D
        D       = 1 - 2 prod(1 - q_h) + prod(1 - 2 q_h + q11_h)

    by damped Newton from the start (q, q11) = (ell, omega).
    """
    ell_arr = np.asarray(ell, dtype=np.float64)
    om = np.asarray(omega, dtype=np.float64)
    if k is None:
        k = ell_arr.size
    if ell_arr.size != k or om.size != k:
        raise ValueError("ell and omega must both have length k")
    if np.any(om <= 0.0) or np.any(om >= 1.0):
        raise InfeasibleOmegaError("omega entries must lie in (0, 1)")
    if np.max(np.abs(om - omega_star_row(ell_arr))) >= omega_window:
        raise InfeasibleOmegaError(
            f"omega farther than {omega_window} from the reference row"
        )

    def residual(x):
        q = x[:k]
        q11 = x[k:]
        if np.any(q <= 0.0) or np.any(q >= 1.0) or np.any(q11 <= 0.0) or np.any(q11 >= 1.0):
            return None
        one_minus = 1.0 - q
        q00 = 1.0 - 2.0 * q + q11
        if np.any(q00 <= 0.0):
            return None
        prod_q = np.prod(one_minus)
        prod_00 = np.prod(q00)
        denom = 1.0 - 2.0 * prod_q + prod_00
        if denom <= 0.0:
            return None
        prod_except = prod_q / one_minus
        top = q - (q - q11) * prod_except
        return np.concatenate([top / denom - ell_arr, q11 / denom - om])

    x0 = np.concatenate([ell_arr, om])
    x, res = _newton_system(residual, x0, tol=tol)
    sol = PairMomentSolution(
        tuple(float(v) for v in ell_arr),
        tuple(float(v) for v in om),
        k,
        x[:k],
        x[k:],
        res,
    )
    if np.any(sol.q10 < -1e-12) or np.any(sol.q00 <= 0.0):
        raise InfeasibleOmegaError("solution leaves the probability simplex")
    return sol


def pair_exponent(ell, omega, k: int | None = None) -> float:
    """Per-clause exponent of the doubly-constrained satisfaction probability:

        ln D - sum_j [ psi(q11_j, omega_j)
                       + (1 - omega_j) psi( q00_j/(1-q11_j),
                                            (1 - 2 ell_j + omega_j)/(1 - omega_j) ) ]
    evaluated at the pair fixed point.
    """
    sol = solve_pair_q(ell, omega, k)
    k = sol.k
    ln_d = math.log(sol.doubly_sat_probability())
    total = ln_d
    for j in range(k):
        om_j = sol.omega[j]
        ell_j = sol.ell[j]
        p2 = float(sol.q00[j] / (1.0 - sol.q11[j]))
        t2 = (1.0 - 2.0 * ell_j + om_j) / (1.0 - om_j)
        total -= binom_rate(float(sol.q11[j]), om_j)
        total -= (1.0 - om_j) * binom_rate(p2, t2)
    return total


def pair_gradient(ell, k: int | None = None, step: float = 1e-4) -> np.ndarray:
    """Central finite-difference gradient of the pair exponent at the
    reference overlap row (expected to vanish)."""
    ell = np.asarray(ell, dtype=np.float64)
    if k is None:
        k = ell.size
    base = omega_star_row(ell)
    grad = np.empty(k)
    for j in range(k):
        up = base.copy()
        up[j] += step
        dn = base.copy()
        dn[j] -= step
        grad[j] = (pair_exponent(ell, up, k) - pair_exponent(ell, dn, k)) / (2 * step)
    return grad


@dataclass(frozen=True)
class HessianReport:
    k: int
    ell: tuple
    step: float
    matrix: np.ndarray
    max_abs: float
    bound: float
    within_bound: bool


def check_hessian_bound(ell, k: int | None = None, step: float = 1e-3) -> HessianReport:
    """Second central differences of the pair exponent at the reference row;
    the curvature bound is concretized as k^6 * 4^-k (polylog factor k^6
    standing in for the hidden logarithmic terms)."""
    ell = np.asarray(ell, dtype=np.float64)
    if k is None:
        k = ell.size
    base = omega_star_row(ell)
    p0 = pair_exponent(ell, base, k)
    hess = np.empty((k, k))
    for j in range(k):
        up = base.copy()
        up[j] += step
        dn = base.copy()
        dn[j] -= step
        hess[j, j] = (
            pair_exponent(ell, up, k) - 2.0 * p0 + pair_exponent(ell, dn, k)
        ) / step**2
    for i in range(k):
        for j in range(i + 1, k):
            pp = base.copy()
            pp[[i, j]] += step
            pm = base.copy()
            pm[i] += step
            pm[j] -= step
            mp = base.copy()
            mp[i] -= step
            mp[j] += step
            mm = base.copy()
            mm[[i, j]] -= step
            val = (
                pair_exponent(ell, pp, k)
                - pair_exponent(ell, pm, k)
                - pair_exponent(ell, mp, k)
                + pair_exponent(ell, mm, k)
            ) / (4.0 * step**2)
            hess[i, j] = val
            hess[j, i] = val
    max_abs = float(np.max(np.abs(hess)))
    bound = float(k**6 * 4.0**-k)
    return HessianReport(
        k=k,
        ell=tuple(float(v) for v in ell),
        step=step,
        matrix=hess,
        max_abs=max_abs,
        bound=bound,
        within_bound=bool(max_abs <= bound),
    )
