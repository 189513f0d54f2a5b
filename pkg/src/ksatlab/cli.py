"""One binary, subcommand style: gen, census, marginals, moments, saddle,
bounds, experiment.

Conventions: seed defaults to 0; exactly one of --m/--r selects the clause
count (r rounds as m = floor(r*n + 1/2)); --format json errors go to stderr
as one-line JSON.  Exit codes: 0 success, 1 verification failure, 2 usage
error.  Identical invocations with identical seeds produce byte-identical
output files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bounds_mod
from . import census as census_mod
from . import core, gen, moments, saddle
from .core import FormulaError
from .experiments import EXPERIMENTS
from .marginals import majority_vote

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    pass


class VerificationFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    k: int | None = None
    n: int | None = None
    m: int | None = None
    r: float | None = None
    seed: int = 0
    cap: int = census_mod.DEFAULT_CAP
    threads: int = 0  # 0 = available cores
    out: str | None = None
    fmt: str = "text"
    extra: dict = field(default_factory=dict)

    def resolved_m(self) -> int:
        if (self.m is None) == (self.r is None):
            raise UsageError("exactly one of --m and --r is required")
        if self.m is not None:
            return self.m
        return int(math.floor(self.r * self.n + 0.5))

    def resolved_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_bounds(cfg: RunConfig) -> int:
    b = bounds_mod.threshold_bounds(cfg.k)
    if cfg.fmt == "json":
        _emit(_json_dumps(b.as_dict()) + "\n", cfg.out)
    else:
        lines = [
            f"k = {b.k}",
            f"r_upper = {b.r_upper:.6f}",
            f"r_bal   = {b.r_bal:.6f}",
            f"r_bp    = {b.r_bp:.6f}",
            f"gap r_upper - r_bp = {b.r_upper - b.r_bp:.6f} (= ln2 - 1/2)",
            f"note: {b.caveat}",
        ]
        _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def _cmd_gen(cfg: RunConfig) -> int:
    model = cfg.extra["model"]
    m = cfg.resolved_m()
    seed = cfg.seed
    meta = {
        "model": model,
        "k": cfg.k,
        "n": cfg.n,
        "m": m,
        "seed": seed,
    }
    if model == "uniform":
        formula = gen.sample_uniform(cfg.n, m, cfg.k, seed)
    elif model == "configuration":
        d = gen.sample_degree_sequence(cfg.n, m, cfg.k, seed)
        formula = gen.sample_formula_given_degrees(d, (seed, 1))
    elif model == "typed":
        d = gen.sample_degree_sequence(cfg.n, m, cfg.k, seed)
        draft = gen.sample_formula_given_degrees(d, (seed, 1))
        table = core.build_type_table(d)
        counts = core.clause_type_counts(draft, table)
        formula = gen.sample_formula_given_degrees_and_types(
            d, counts, (seed, 2), table=table
        )
    elif model == "planted":
        formula, sigma = gen.sample_planted_pair(cfg.n, m, cfg.k, seed)
        meta["planted_assignment"] = [int(v) for v in sigma]
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown model {model!r}")
    _emit(core.emit_dimacs(formula), cfg.out)
    if cfg.extra.get("meta_out"):
        with open(cfg.extra["meta_out"], "w") as fh:
            fh.write(_json_dumps(meta) + "\n")
    return EXIT_OK


def _read_formula(cfg: RunConfig) -> core.Formula:
    path = cfg.extra["input"]
    try:
        return core.read_dimacs(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _cmd_census(cfg: RunConfig) -> int:
    formula = _read_formula(cfg)
    threads = cfg.resolved_threads()
    try:
        counts, nsat = census_mod.empirical_marginal_counts(
            formula, cap=cfg.cap, threads=threads
        )
    except census_mod.CapExceededError as exc:
        raise UsageError(str(exc)) from exc
    report = {
        "n": formula.n,
        "k": formula.k,
        "m": formula.m,
        "count": nsat,
        "cap": cfg.cap,
    }
    if nsat:
        report["marginals"] = (counts / nsat).tolist()
        report["mean_distance_to_majority"] = float(
            census_mod.mean_distance_to_majority(formula, cap=cfg.cap)
        )
    if formula.n <= cfg.extra.get("spectrum_cap", 20):
        report["pair_distance_spectrum"] = census_mod.pair_distance_spectrum(
            formula, cap=cfg.cap
        ).tolist()
    _emit(_json_dumps(report) + "\n", cfg.out)
    return EXIT_OK


def _cmd_marginals(cfg: RunConfig) -> int:
    formula = _read_formula(cfg)
    d = core.degree_sequence_of(formula)
    table = core.build_type_table(d)
    maj = majority_vote(d)
    lines = []
    for x in range(formula.n):
        lines.append(
            _json_dumps(
                {
                    "x": x,
                    "d_pos": int(d.d_pos[x]),
                    "d_neg": int(d.d_neg[x]),
                    "p": float(table.value(int(table.var_z[x]))),
                    "maj": int(maj[x]),
                }
            )
        )
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def _parse_type_spec(spec: str, k: int) -> tuple:
    if spec == "symmetric":
        return tuple(0.5 for _ in range(k))
    vals = tuple(float(x) for x in spec.split(","))
    if len(vals) != k:
        raise UsageError(f"type spec needs {k} comma-separated entries")
    return vals


def _cmd_moments(cfg: RunConfig) -> int:
    k = cfg.k
    r = cfg.r if cfg.r is not None else bounds_mod.r_bp(k)
    ell = _parse_type_spec(cfg.extra.get("type_spec") or "symmetric", k)
    report = {"k": k, "r": r, "ell": list(ell)}
    first = moments.solve_first_moment_q(ell, k)
    report["first_moment_q"] = first.q.tolist()
    report["first_moment_residual"] = first.residual
    # per-clause exponent pieces at this type: ln P[sat] and the slot-count
    # rate sum, the building blocks of the assembled first-moment exponent
    report["ln_sat_probability"] = math.log(first.sat_probability())
    report["psi_sum"] = sum(
        moments.binom_rate(float(qj), lj) for qj, lj in zip(first.q, ell)
    )

    omega_spec = cfg.extra.get("omega") or "star"
    if omega_spec == "star":
        omega = tuple(v * v for v in ell)
    else:
        omega = tuple(float(x) for x in omega_spec.split(","))
        if len(omega) != k:
            raise UsageError(f"omega needs {k} comma-separated entries")
    pair = moments.solve_pair_q(ell, omega, k)
    report["pair_q"] = pair.q.tolist()
    report["pair_q11"] = pair.q11.tolist()
    report["pair_residual"] = pair.residual
    report["pair_exponent"] = moments.pair_exponent(ell, omega, k)
    report["gradient_norm_at_star"] = float(
        np.max(np.abs(moments.pair_gradient(ell, k)))
    )

    failed = False
    if cfg.extra.get("verify_offdiag"):
        sweep = moments.verify_offdiag(k, r, grid_size=cfg.extra.get("grid", 100_000))
        report["offdiag"] = {
            "max_value": sweep.max_value,
            "argmax_x": sweep.argmax_x,
            "n_points": sweep.n_points,
            "all_negative": sweep.all_negative,
        }
        failed = not sweep.all_negative
    _emit(_json_dumps(report) + "\n", cfg.out)
    if failed:
        raise VerificationFailure(
            f"off-diagonal exponent reached {report['offdiag']['max_value']:.3e} "
            f">= 0 at x = {report['offdiag']['argmax_x']:.6f}"
        )
    return EXIT_OK


def _cmd_saddle(cfg: RunConfig) -> int:
    path = cfg.extra["pairs"]
    try:
        d = core.read_degree_sequence(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    pairs = d.degree_pairs()
    mode = cfg.extra["mode"]
    eps = cfg.extra.get("epsilon") or 0.0
    try:
        if mode == "simple":
            total = sum(a + b for a, b in pairs)
            if total % 2:
                raise UsageError("total degree must be even for the central target")
            exact = saddle.exact_coefficient(pairs, total // 2)
            approx = saddle.coeff_simple_asymptotic(pairs)
        else:
            exact = saddle.exact_triple_coefficient(pairs, eps)
            approx = saddle.coeff_triple_asymptotic(pairs, eps)
    except saddle.InfeasibleTargetError as exc:
        raise UsageError(str(exc)) from exc
    ratio = approx / exact if exact else math.inf
    report = {
        "mode": mode,
        "epsilon": eps,
        "n_pairs": len(pairs),
        "exact": str(exact),
        "asymptotic": approx,
        "ratio": ratio,
    }
    _emit(_json_dumps(report) + "\n", cfg.out)
    return EXIT_OK


def _cmd_experiment(cfg: RunConfig) -> int:
    name = cfg.extra["name"]
    if name not in EXPERIMENTS:
        raise UsageError(
            f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}"
        )
    kwargs = {
        "k": cfg.k,
        "n": cfg.n,
        "trials": cfg.extra["trials"],
        "seed": cfg.seed,
        "m": cfg.m,
        "r": cfg.r,
        "threads": cfg.resolved_threads(),
    }
    if name in ("majority-skew", "marginal-correlation"):
        kwargs["cap"] = cfg.cap
    report = EXPERIMENTS[name](**kwargs).as_dict()
    lines = []
    per_trial = report.pop("per_trial", None)
    if per_trial is not None:
        for i, v in enumerate(per_trial):
            if isinstance(v, list):  # wmaj trials carry (uniform, planted) pairs
                lines.append(
                    _json_dumps({"trial": i, "uniform": v[0], "planted": v[1]})
                )
            else:
                lines.append(_json_dumps({"trial": i, "value": v}))
    lines.append(_json_dumps({"summary": report}))
    text = "\n".join(lines) + "\n"
    json_out = cfg.extra.get("json_out")
    _emit(text, json_out or cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ksatlab",
        description="Random k-SAT laboratory: generators, census oracles, "
        "moment and saddle-point numerics.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, need_seed=True):
        if need_seed:
            p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument(
            "--format",
            dest="fmt",
            choices=["text", "json"],
            default="json",
            help="output format (default json)",
        )
        p.add_argument(
            "--threads",
            type=int,
            default=0,
            help="worker parallelism cap (default: available cores)",
        )

    p = sub.add_parser("bounds", help="closed-form threshold bounds")
    p.add_argument("--k", type=int, required=True)
    common(p, need_seed=False)

    p = sub.add_parser("gen", help="sample a random formula")
    p.add_argument(
        "--model",
        choices=["uniform", "configuration", "typed", "planted"],
        default="uniform",
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--meta-out", dest="meta_out", help="write JSON metadata here")
    common(p)

    p = sub.add_parser("census", help="exhaustive census of a DIMACS file")
    p.add_argument("--input", required=True, help="DIMACS CNF path")
    p.add_argument("--cap", type=int, default=census_mod.DEFAULT_CAP)
    common(p, need_seed=False)

    p = sub.add_parser("marginals", help="per-variable degree/type/majority table")
    p.add_argument("--input", required=True, help="DIMACS CNF path")
    common(p, need_seed=False)

    p = sub.add_parser("moments", help="fixed points, exponents, sweeps")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=float, help="density (default: the BP bound)")
    p.add_argument("--type-spec", dest="type_spec", default="symmetric")
    p.add_argument("--omega", default="star")
    p.add_argument(
        "--verify-offdiag",
        dest="verify_offdiag",
        action="store_true",
        help="sweep the off-diagonal exponent; exit 1 if any grid value >= 0",
    )
    p.add_argument("--grid", type=int, default=100_000)
    common(p, need_seed=False)

    p = sub.add_parser("saddle", help="coefficient oracle vs asymptotic")
    p.add_argument("--pairs", required=True, help="degree-sequence file")
    p.add_argument("--mode", choices=["simple", "triple"], default="simple")
    p.add_argument("--epsilon", type=float, default=0.0)
    common(p, need_seed=False)

    p = sub.add_parser("experiment", help="run a verification campaign")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--cap", type=int, default=census_mod.DEFAULT_CAP)
    p.add_argument("--json-out", dest="json_out", help="write JSON lines here")
    common(p)

    return parser


_COMMANDS = {
    "bounds": _cmd_bounds,
    "gen": _cmd_gen,
    "census": _cmd_census,
    "marginals": _cmd_marginals,
    "moments": _cmd_moments,
    "saddle": _cmd_saddle,
    "experiment": _cmd_experiment,
}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    known = {"subcommand", "k", "n", "m", "r", "seed", "cap", "out", "fmt", "threads"}
    extra = {k: v for k, v in vars(args).items() if k not in known}
    return RunConfig(
        subcommand=args.subcommand,
        k=getattr(args, "k", None),
        n=getattr(args, "n", None),
        m=getattr(args, "m", None),
        r=getattr(args, "r", None),
        seed=getattr(args, "seed", 0),
        cap=getattr(args, "cap", census_mod.DEFAULT_CAP),
        threads=getattr(args, "threads", 0),
        out=getattr(args, "out", None),
        fmt=getattr(args, "fmt", "json"),
        extra=extra,
    )


def dispatch(cfg: RunConfig) -> int:
    """Run one subcommand; returns the process exit status."""
    try:
        return _COMMANDS[cfg.subcommand](cfg)
    except VerificationFailure as exc:
        _report_error(cfg, f"verification failure: {exc}")
        return EXIT_VERIFICATION
    except (UsageError, FormulaError, ValueError) as exc:
        _report_error(cfg, str(exc))
        return EXIT_USAGE


def _report_error(cfg: RunConfig, message: str) -> None:
    if cfg.fmt == "json":
        sys.stderr.write(_json_dumps({"error": message}) + "\n")
    else:
        sys.stderr.write(f"error: {message}\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return dispatch(config_from_args(args))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
