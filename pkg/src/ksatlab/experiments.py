"""Scripted verification campaigns: claims vs. simulation.

Each experiment ties the generators to the census oracle or to closed-form
targets, runs seed-derived independent trials, and returns a report embedding
(seed, parameters, build id) so that any number in it can be reproduced
bit-exactly.  Desk-scale caveat: enumeration-based experiments condition on
satisfiability and record how many unsatisfiable draws were discarded.
"""

from __future__ import annotations

import math
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import expected_majority_weight, majority_weight_normal_estimate
from .census import empirical_marginal_counts, mean_distance_to_majority
from .core import degree_sequence_of
from .gen import derived_seed, sample_planted_pair, sample_uniform
from .marginals import majority_weight


def build_id() -> str:
    """git-describe-style identifier of the code that produced a report."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"ksatlab-{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return f"ksatlab-{__version__}"


def _resolve_m(n: int, m: int | None, r: float | None) -> int:
    if (m is None) == (r is None):
        raise ValueError("exactly one of m and r must be given")
    if m is None:
        m = int(math.floor(r * n + 0.5))
    return m


def _map_trials(worker, n_trials: int, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(worker, range(n_trials)))
    return [worker(i) for i in range(n_trials)]


@dataclass(frozen=True)
class MajoritySkewReport:
    k: int
    n: int
    m: int
    trials: int
    seed: int
    build: str
    cap: int
    discarded_unsat: int
    per_trial: list = field(repr=False)  # normalized mean distance, one per trial
    fraction_below_half: float = 0.0
    mean_skew: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def run_majority_skew(
    k: int,
    n: int,
    trials: int,
    seed: int = 0,
    m: int | None = None,
    r: float | None = None,
    cap: int = 30,
    threads: int = 1,
    max_attempts_factor: int = 50,
) -> MajoritySkewReport:
    """Normalized mean Hamming distance of satisfying assignments from the
    majority vote, over `trials` satisfiable uniform instances.

    Discarded unsatisfiable draws are counted; the summary reports the
    fraction of satisfiable instances with skew strictly below 1/2.
    """
    m = _resolve_m(n, m, r)
    values: list[float] = []
    discarded = 0
    attempt = 0
    max_attempts = max_attempts_factor * trials

    # trials are indexed by attempt so results do not depend on thread timing
    while len(values) < trials and attempt < max_attempts:
        batch = min(trials - len(values) + 8, max_attempts - attempt)
        idxs = list(range(attempt, attempt + batch))
        attempt += batch

        def one(i):
            formula = sample_uniform(n, m, k, derived_seed(seed, i))
            try:
                return float(mean_distance_to_majority(formula, cap=cap))
            except ValueError:
                return None

        for got in _map_trials(lambda j: one(idxs[j]), len(idxs), threads):
            if got is None:
                discarded += 1
            elif len(values) < trials:
                values.append(got)
    if len(values) < trials:
        raise RuntimeError(
            f"only {len(values)} satisfiable instances in {attempt} attempts"
        )
    below = sum(1 for v in values if v < 0.5)
    return MajoritySkewReport(
        k=k,
        n=n,
        m=m,
        trials=trials,
        seed=int(seed),
        build=build_id(),
        cap=cap,
        discarded_unsat=discarded,
        per_trial=values,
        fraction_below_half=below / trials,
        mean_skew=float(np.mean(values)),
    )


@dataclass(frozen=True)
class MarginalCorrelationReport:
    k: int
    n: int
    m: int
    trials: int
    seed: int
    build: str
    cap: int
    discarded_unsat: int
    n_points: int
    correlation: float
    slope: float
    conjectured_slope: float
    balanced_stratum_mean: float
    balanced_stratum_se: float

    def as_dict(self) -> dict:
        return asdict(self)


def run_marginal_correlation(
    k: int,
    n: int,
    trials: int,
    seed: int = 0,
    m: int | None = None,
    r: float | None = None,
    cap: int = 30,
    threads: int = 1,
    max_attempts_factor: int = 50,
) -> MarginalCorrelationReport:
    """Regression of enumerated marginals mu(x) - 1/2 on the occurrence
    imbalance d_x - d_neg_x, pooled over satisfiable instances; the slope is
    compared against the conjectured 2^-(k+1)."""
    m = _resolve_m(n, m, r)
    xs: list[float] = []
    ys: list[float] = []
    discarded = 0
    collected = 0
    attempt = 0
    max_attempts = max_attempts_factor * trials
    while collected < trials and attempt < max_attempts:
        batch = min(trials - collected + 8, max_attempts - attempt)
        idxs = list(range(attempt, attempt + batch))
        attempt += batch

        def one(i):
            formula = sample_uniform(n, m, k, derived_seed(seed, i))
            counts, nsat = empirical_marginal_counts(formula, cap=cap)
            if nsat == 0:
                return None
            d = degree_sequence_of(formula)
            return (d.imbalance().astype(float), counts / nsat - 0.5)

        for got in _map_trials(lambda j: one(idxs[j]), len(idxs), threads):
            if got is None:
                discarded += 1
            elif collected < trials:
                xs.extend(got[0].tolist())
                ys.extend(got[1].tolist())
                collected += 1
    if collected < trials:
        raise RuntimeError(
            f"only {collected} satisfiable instances in {attempt} attempts"
        )
    x = np.asarray(xs)
    y = np.asarray(ys)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    corr = float(xc @ yc) / denom if denom else 0.0
    slope = float(xc @ yc) / float(xc @ xc) if float(xc @ xc) else 0.0
    mask = x == 0
    stratum = y[mask] + 0.5
    se = float(stratum.std(ddof=1) / math.sqrt(stratum.size)) if stratum.size > 1 else 0.0
    return MarginalCorrelationReport(
        k=k,
        n=n,
        m=m,
        trials=trials,
        seed=int(seed),
        build=build_id(),
        cap=cap,
        discarded_unsat=discarded,
        n_points=int(x.size),
        correlation=corr,
        slope=slope,
        conjectured_slope=2.0 ** -(k + 1),
        balanced_stratum_mean=float(stratum.mean()) if stratum.size else 0.5,
        balanced_stratum_se=se,
    )


@dataclass(frozen=True)
class WmajFluctuationReport:
    k: int
    n: int
    m: int
    trials: int
    seed: int
    build: str
    uniform_mean: float
    uniform_var: float
    planted_mean: float
    planted_var: float
    expected_uniform_closed_form: float
    expected_uniform_normal_estimate: float
    planted_minus_uniform: float
    histogram_edges: list = field(repr=False)
    uniform_histogram: list = field(repr=False)
    planted_histogram: list = field(repr=False)
    per_trial: list = field(repr=False, default_factory=list)  # [uniform, planted]

    def as_dict(self) -> dict:
        return asdict(self)


def run_wmaj_fluctuation(
    k: int,
    n: int,
    trials: int,
    seed: int = 0,
    m: int | None = None,
    r: float | None = None,
    threads: int = 1,
    bins: int = 30,
) -> WmajFluctuationReport:
    """Empirical majority-weight distribution under the uniform and planted
    models.  No enumeration involved; the planted mean is expected to sit
    above the uniform mean (positive conditioning shift)."""
    m = _resolve_m(n, m, r)

    def uniform_one(i):
        formula = sample_uniform(n, m, k, derived_seed(seed, 2 * i))
        return float(majority_weight(degree_sequence_of(formula)))

    def planted_one(i):
        formula, _ = sample_planted_pair(n, m, k, derived_seed(seed, 2 * i + 1))
        return float(majority_weight(degree_sequence_of(formula)))

    uni = np.asarray(_map_trials(uniform_one, trials, threads))
    pla = np.asarray(_map_trials(planted_one, trials, threads))
    lo = float(min(uni.min(), pla.min()))
    hi = float(max(uni.max(), pla.max()))
    if lo == hi:
        hi = lo + 1e-9
    edges = np.linspace(lo, hi, bins + 1)
    return WmajFluctuationReport(
        k=k,
        n=n,
        m=m,
        trials=trials,
        seed=int(seed),
        build=build_id(),
        uniform_mean=float(uni.mean()),
        uniform_var=float(uni.var(ddof=1)) if trials > 1 else 0.0,
        planted_mean=float(pla.mean()),
        planted_var=float(pla.var(ddof=1)) if trials > 1 else 0.0,
        expected_uniform_closed_form=expected_majority_weight(k, m / n),
        expected_uniform_normal_estimate=majority_weight_normal_estimate(k, m / n),
        planted_minus_uniform=float(pla.mean() - uni.mean()),
        histogram_edges=edges.tolist(),
        uniform_histogram=np.histogram(uni, bins=edges)[0].tolist(),
        planted_histogram=np.histogram(pla, bins=edges)[0].tolist(),
        per_trial=[[float(u), float(p)] for u, p in zip(uni, pla)],
    )


EXPERIMENTS = {
    "majority-skew": run_majority_skew,
    "marginal-correlation": run_marginal_correlation,
    "wmaj-fluctuation": run_wmaj_fluctuation,
}
