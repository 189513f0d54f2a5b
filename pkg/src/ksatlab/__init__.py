"""Random k-SAT laboratory.

A numpy/scipy toolbox for experimenting with random k-CNF formulas around
the satisfiability threshold: seed-deterministic generators for the uniform,
configuration (fixed signed degrees), typed and planted models, exhaustive
enumeration oracles at small n, and the first/second-moment and saddle-point
numerics that back the threshold bounds.
"""

__version__ = "0.1.0"

from . import bounds, census, cli, core, experiments, gen, marginals, moments, saddle

__all__ = [
    "bounds",
    "census",
    "cli",
    "core",
    "experiments",
    "gen",
    "marginals",
    "moments",
    "saddle",
    "__version__",
]
