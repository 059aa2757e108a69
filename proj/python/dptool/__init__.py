"""Decision-problem analysis toolkit.

Thin wrapper over the compiled core: problem loading, Bayesian quantities,
rational benchmarks, disclosure audits, and seeded agent simulation.
"""

from ._core import (
    Problem,
    __version__,
    analyze,
    audit,
    design_sweep,
    likelihood,
    load_problem,
    marginal_prior,
    multiplicity,
    posterior,
    problem_from_json,
    run_learning,
    score_csv,
    signal_marginal,
    simulate_exact,
    simulate_sample,
    validate,
)

__all__ = [
    "Problem",
    "__version__",
    "analyze",
    "audit",
    "design_sweep",
    "likelihood",
    "load_problem",
    "marginal_prior",
    "multiplicity",
    "posterior",
    "problem_from_json",
    "run_learning",
    "score_csv",
    "signal_marginal",
    "simulate_exact",
    "simulate_sample",
    "validate",
]
