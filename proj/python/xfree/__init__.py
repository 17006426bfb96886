"""Pattern-free subsets of the grid [n]^d."""

from ._xfree import (
    BudgetError,
    Pattern,
    behrend_1d,
    behrend_lift,
    codegree_stats,
    compute_t,
    container_params,
    count_copies,
    count_free,
    enumerate_copies,
    exact_expected_gamma,
    gamma_count,
    prime_pi,
    run_cli,
    solve_rx,
    verify_pnt_constant,
)

__all__ = [
    "BudgetError",
    "Pattern",
    "behrend_1d",
    "behrend_lift",
    "codegree_stats",
    "compute_t",
    "container_params",
    "count_copies",
    "count_free",
    "enumerate_copies",
    "exact_expected_gamma",
    "gamma_count",
    "prime_pi",
    "run_cli",
    "solve_rx",
    "verify_pnt_constant",
]
