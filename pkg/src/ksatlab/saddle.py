"""Generating-function coefficient extraction.

Exact big-integer oracles for the degree-pair products that count assignments
with prescribed neutral-type weight, their saddle-point asymptotics (simple
and triple), the tilt equation for off-center targets, and a local limit
theorem evaluator for sums of i.i.d. integer random variables.

Degree pairs are plain ``(d_v, d_neg_v)`` integer tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXACT_ORACLE_CAP = 10_000  # pairs; the simple oracle is O(N * M) big-int adds
TRIPLE_ORACLE_CAP = 60


class InfeasibleTargetError(ValueError):
    """Coefficient target is not attainable (non-integral or out of range)."""


def _as_pairs(pairs) -> list:
    out = [(int(d), int(e)) for d, e in pairs]
    if any(d < 0 or e < 0 for d, e in out):
        raise ValueError("degrees must be non-negative")
    return out


# ---------------------------------------------------------------------------
# Exact simple oracle: [z^target] prod_v (z^{d_v} + z^{d_neg_v})
# ---------------------------------------------------------------------------


def exact_coefficient(pairs, target: int) -> int:
    """Exact coefficient of z^target in prod (z^{d_v} + z^{d_neg_v}),
    by iterated shifted addition over arbitrary-precision integers."""
    pairs = _as_pairs(pairs)
    if len(pairs) > EXACT_ORACLE_CAP:
        raise ValueError(f"oracle capped at {EXACT_ORACLE_CAP} pairs")
    if target < 0:
        raise InfeasibleTargetError("target must be non-negative")
    total = sum(d + e for d, e in pairs)
    if target > total:
        return 0
    # Every factor shifts by at least min(d, e); powers beyond the remaining
    # shift budget cannot reach the target and are pruned.
    mins = [min(d, e) for d, e in pairs]
    suffix_min = [0] * (len(pairs) + 1)
    for i in range(len(pairs) - 1, -1, -1):
        suffix_min[i] = suffix_min[i + 1] + mins[i]
    if target < suffix_min[0]:
        return 0
    coeffs = [1]
    shift = 0
    for i, (d, e) in enumerate(pairs):
        shift += mins[i]
        diff = abs(d - e)
        limit = target - shift - suffix_min[i + 1]
        if limit < 0:
            return 0
        old = coeffs
        new_len = min(len(old) + diff, limit + 1)
        new = old[:new_len] + [0] * (new_len - len(old))
        if diff:
            for idx in range(min(len(old) - 1, new_len - 1 - diff), -1, -1):
                new[idx + diff] += old[idx]
        else:
            for idx in range(len(new)):
                new[idx] += new[idx]
        coeffs = new
    idx = target - shift
    if idx < 0 or idx >= len(coeffs):
        return 0
    return coeffs[idx]


# ---------------------------------------------------------------------------
# Simple saddle-point asymptotic for the central coefficient
# ---------------------------------------------------------------------------


def coeff_simple_asymptotic(pairs) -> float:
    """Gaussian approximation of the central coefficient [z^{M/2}]:

        2^N / (2 sqrt(pi * S2)),   S2 = sum (d_v - d_neg_v)^2 / 8.

    The linear phase cancels against the centering, so only the squared
    imbalances feed the curvature.  When every pair is tied the coefficient
    equals 2^N exactly and that value is returned.  Requires M even; the
    imbalance lattice is assumed aperiodic (gcd of the nonzero imbalances 1),
    which holds for generic sampled degrees.
    """
    pairs = _as_pairs(pairs)
    n = len(pairs)
    total = sum(d + e for d, e in pairs)
    if total % 2:
        raise InfeasibleTargetError("total degree M must be even for a central target")
    s2 = sum((d - e) ** 2 for d, e in pairs) / 8.0
    if s2 == 0.0:
        return float(2**n)
    return (2.0**n) / (2.0 * math.sqrt(math.pi * s2))


# ---------------------------------------------------------------------------
# Local limit theorem
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PGF:
    """Probability generating function with first two derivatives."""

    f: callable
    df: callable
    d2f: callable


def pgf_from_coeffs(probs) -> PGF:
    p = np.asarray(probs, dtype=np.float64)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("coefficients must be a probability vector")
    powers = np.arange(p.size)

    def f(z):
        return float(np.sum(p * z**powers))

    def df(z):
        return float(np.sum(p[1:] * powers[1:] * z ** (powers[1:] - 1)))

    def d2f(z):
        if p.size < 3:
            return 0.0
        pw = powers[2:]
        return float(np.sum(p[2:] * pw * (pw - 1) * z ** (pw - 2)))

    return PGF(f, df, d2f)


def pgf_bernoulli(p: float) -> PGF:
    return pgf_from_coeffs([1.0 - p, p])


def pgf_poisson(lam: float) -> PGF:
    def f(z):
        return math.exp(lam * (z - 1.0))

    def df(z):
        return lam * math.exp(lam * (z - 1.0))

    def d2f(z):
        return lam * lam * math.exp(lam * (z - 1.0))

    return PGF(f, df, d2f)


def local_limit(pgf: PGF, alpha: float, n: int) -> float:
    """Pointwise approximation of P[X_1 + ... + X_n = alpha n] for i.i.d.
    integer variables with entire, aperiodic pgf P:

        (P(zeta) / zeta^alpha)^n / (zeta * sqrt(2 pi n xi)),

    where zeta solves zeta P'(zeta)/P(zeta) = alpha (monotone bisection) and
    xi is the second derivative of ln P(z) - alpha ln z at zeta."""
    if alpha <= 0:
        raise ValueError("alpha must be positive (and below the support limit)")

    def mean_at(z):
        return z * pgf.df(z) / pgf.f(z)

    lo, hi = 1.0, 1.0
    for _ in range(200):
        if mean_at(lo) <= alpha:
            break
        lo /= 2.0
    else:
        raise ValueError("alpha below the reachable tilt range")
    for _ in range(200):
        if mean_at(hi) >= alpha:
            break
        hi *= 2.0
    else:
        raise ValueError("alpha above the reachable tilt range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean_at(mid) < alpha:
            lo = mid
        else:
            hi = mid
    zeta = 0.5 * (lo + hi)
    fz = pgf.f(zeta)
    dz = pgf.df(zeta)
    d2z = pgf.d2f(zeta)
    xi = d2z / fz - (dz / fz) ** 2 + alpha / zeta**2
    if xi <= 0:
        raise ValueError("degenerate saddle (zero curvature)")
    log_val = n * (math.log(fz) - alpha * math.log(zeta))
    return math.exp(log_val) / (zeta * math.sqrt(2.0 * math.pi * n * xi))


# ---------------------------------------------------------------------------
# Tilt equation for off-center targets
# ---------------------------------------------------------------------------


def solve_rho(pairs, eps: float, tol: float = 1e-12) -> float:
    """Solve (1/4 + eps) M = sum_v g_v / (2 + 2 rho^{g_v}), g_v = d_v+d_neg_v.

    The right side is strictly decreasing in rho, so a bisection over
    [2^-20, 2^20] brackets the root; a Newton polish finishes it off.
    eps = 0 gives rho = 1 exactly."""
    if not (-0.25 < eps < 0.25):
        raise ValueError("eps must lie in (-1/4, 1/4)")
    pairs = _as_pairs(pairs)
    g = np.asarray([d + e for d, e in pairs], dtype=np.float64)
    m_total = float(g.sum())
    if m_total == 0:
        raise ValueError("all degrees are zero")
    target = 0.25 + eps

    def value(rho):
        return float(np.sum(g / (2.0 + 2.0 * rho**g))) / m_total

    def deriv(rho):
        powg = rho**g
        return float(np.sum(-(g * g) * powg / (rho * 2.0 * (1.0 + powg) ** 2))) / m_total

    lo, hi = 2.0**-20, 2.0**20
    if not (value(hi) <= target <= value(lo)):
        raise ValueError("target outside the bracket [2^-20, 2^20]")
    for _ in range(80):
        mid = math.sqrt(lo * hi)
        if value(mid) > target:
            lo = mid
        else:
            hi = mid
    rho = 0.5 * (lo + hi)
    for _ in range(60):
        resid = value(rho) - target
        if abs(resid) <= tol:
            break
        step = resid / deriv(rho)
        nxt = rho - step
        if nxt <= 0:
            nxt = rho / 2.0
        rho = nxt
    if abs(value(rho) - target) > tol:
        raise ValueError("tilt equation did not converge")
    return float(rho)


# ---------------------------------------------------------------------------
# Triple oracle: [(xy)^{M/2} u^{(1/4+eps)M}] prod_v ((xyu)^{d} + (xyu)^{e}
#                                                   + x^d y^e + x^e y^d)
# ---------------------------------------------------------------------------


def _triple_target(pairs, eps: float) -> tuple:
    m_total = sum(d + e for d, e in pairs)
    if m_total % 2:
        raise InfeasibleTargetError("total degree M must be even")
    t_float = (0.25 + eps) * m_total
    t = round(t_float)
    if abs(t_float - t) > 1e-9:
        raise InfeasibleTargetError(
            f"(1/4 + eps) M = {t_float} is not an integer overlap target"
        )
    return m_total, int(t)


def _triple_dp(pairs, t_max: int) -> dict:
    """Dynamic program over per-variable choices (both-true, both-false,
    split either way), keyed by the two lattice defects that must vanish for
    the x- and y-powers to hit M/2 each:

        a = sum_{both-true} (d - e) - sum_{both-false} (d - e)
        b = sum_{split x-true} (d - e) - sum_{split y-true} (d - e)

    The u-polynomial of each (a, b) state is packed into one big integer with
    fixed-width blocks; powers above t_max are masked off.
    """
    n = len(pairs)
    block = 2 * n + 8
    mask = (1 << ((t_max + 1) * block)) - 1
    diffs = [abs(d - e) for d, e in pairs]
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + diffs[i]
    states = {(0, 0): 1}
    for i, (d, e) in enumerate(pairs):
        dd = d - e
        rem = suffix[i + 1]
        new: dict = {}
        for (a, b), val in states.items():
            tt = val << (d * block) if d * block <= (t_max + 1) * block else 0
            ff = val << (e * block) if e * block <= (t_max + 1) * block else 0
            for key, add in (
                ((a + dd, b), tt),
                ((a - dd, b), ff),
                ((a, b + dd), val),
                ((a, b - dd), val),
            ):
                if abs(key[0]) > rem or abs(key[1]) > rem:
                    continue
                if add:
                    add &= mask
                    if add:
                        prev = new.get(key)
                        new[key] = add if prev is None else prev + add
        states = new
    return {"states": states, "block": block}


def exact_triple_u_coefficients(pairs, t_max: int | None = None) -> list:
    """Exact coefficients over all u-powers at the central (x, y) target:
    entry [t] is [(xy)^{M/2} u^t] of the pair-weight generating function."""
    pairs = _as_pairs(pairs)
    if len(pairs) > TRIPLE_ORACLE_CAP:
        raise ValueError(f"triple oracle capped at {TRIPLE_ORACLE_CAP} pairs")
    m_total = sum(d + e for d, e in pairs)
    if m_total % 2:
        raise InfeasibleTargetError("total degree M must be even")
    if t_max is None:
        t_max = sum(max(d, e) for d, e in pairs)
    dp = _triple_dp(pairs, t_max)
    packed = dp["states"].get((0, 0), 0)
    block = dp["block"]
    out = []
    unit = (1 << block) - 1
    for t in range(t_max + 1):
        out.append((packed >> (t * block)) & unit)
    return out


def exact_triple_coefficient(pairs, eps: float) -> int:
    """Exact [(xy)^{M/2} u^{(1/4+eps)M}] coefficient (big integer)."""
    pairs = _as_pairs(pairs)
    if len(pairs) > TRIPLE_ORACLE_CAP:
        raise ValueError(f"triple oracle capped at {TRIPLE_ORACLE_CAP} pairs")
    _, t = _triple_target(pairs, eps)
    dp = _triple_dp(pairs, t)
    packed = dp["states"].get((0, 0), 0)
    block = dp["block"]
    return (packed >> (t * block)) & ((1 << block) - 1)


@dataclass(frozen=True)
class TripleQuadraticForm:
    s_tt: float  # theta-theta (and phi-phi) curvature
    s_pp: float  # psi-psi curvature
    s_tf: float  # theta-phi cross term
    s_tp: float  # theta-psi (and phi-psi) cross term

    def discriminants(self) -> tuple:
        """Both must be non-negative for the squares to complete."""
        d1 = 4.0 * self.s_tt**2 - self.s_tf**2
        d2 = 2.0 * self.s_pp * self.s_tt - self.s_tp**2 - self.s_pp * self.s_tf
        return d1, d2

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [2.0 * self.s_tt, -self.s_tf, self.s_tp],
                [-self.s_tf, 2.0 * self.s_tt, self.s_tp],
                [self.s_tp, self.s_tp, 2.0 * self.s_pp],
            ]
        )


def triple_quadratic_form(pairs, rho: float) -> TripleQuadraticForm:
    s_tt = s_pp = s_tf = s_tp = 0.0
    for d, e in pairs:
        g = d + e
        dd2 = float(d - e) ** 2
        powg = rho**g
        denom = 2.0 + 2.0 * powg
        s_tt += dd2 / 8.0
        s_pp += (dd2 + 2.0 * powg * (d * d + e * e)) / (2.0 * denom**2)
        s_tf += dd2 * (powg - 1.0) / (2.0 * denom)
        s_tp += dd2 / (2.0 * denom)
    return TripleQuadraticForm(s_tt, s_pp, s_tf, s_tp)


def log_triple_growth(pairs, eps: float, rho: float | None = None) -> float:
    """ln E with E = rho^{-(1-4 eps) M / 2} prod_v (2 + 2 rho^{g_v})."""
    pairs = _as_pairs(pairs)
    m_total = sum(d + e for d, e in pairs)
    if rho is None:
        rho = solve_rho(pairs, eps)
    out = -(1.0 - 4.0 * eps) * (m_total / 2.0) * math.log(rho)
    for d, e in pairs:
        out += math.log(2.0 + 2.0 * rho ** (d + e))
    return out


def coeff_triple_asymptotic(pairs, eps: float) -> float:
    """Gaussian approximation of the triple coefficient: E times the closed
    three-dimensional Gaussian integral of the saddle's quadratic form,
    E / ((2 pi)^{3/2} sqrt(det A)).

    When every pair is tied the x/y phases are exact and the problem
    degenerates to a single contour; the one-dimensional Gaussian
    E / sqrt(4 pi S_pp) is used instead."""
    pairs = _as_pairs(pairs)
    _triple_target(pairs, eps)
    rho = solve_rho(pairs, eps)
    log_e = log_triple_growth(pairs, eps, rho)
    form = triple_quadratic_form(pairs, rho)
    if form.s_tt == 0.0:
        return math.exp(log_e - 0.5 * math.log(4.0 * math.pi * form.s_pp))
    det = float(np.linalg.det(form.matrix()))
    if det <= 0:
        raise ValueError("degenerate quadratic form; asymptotic not applicable")
    return math.exp(log_e - 1.5 * math.log(2.0 * math.pi) - 0.5 * math.log(det))
