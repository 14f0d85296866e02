"""Robust bilinear factorization: RMC, RPCA, matrix completion and CPCP solvers."""

from ._rbf import (
    ConvergenceError,
    ParseError,
    SolverConfig,
    SubspaceOperator,
    auc,
    draw_random_subspace,
    generate_planted,
    nuclear_norm,
    qr,
    relative_error,
    rmse,
    soft_threshold,
    solve_cpcp,
    solve_mc,
    solve_rmc,
    solve_rpca,
    svd,
    svt,
)

__all__ = [
    "ConvergenceError",
    "ParseError",
    "SolverConfig",
    "SubspaceOperator",
    "auc",
    "draw_random_subspace",
    "generate_planted",
    "nuclear_norm",
    "qr",
    "relative_error",
    "rmse",
    "soft_threshold",
    "solve_cpcp",
    "solve_mc",
    "solve_rmc",
    "solve_rpca",
    "svd",
    "svt",
]
