"""First-order descent on stratified sets of matrices.

Thin wrapper around the compiled ``_strataopt`` module: projections onto
bounded-rank, PSD bounded-rank and sparse sets, their tangent cone
projections, stationarity measures, and the benchmark solver drivers.
"""

from ._strataopt import (
    ConfigError,
    delta_rank,
    problems,
    project_nonneg_sparse,
    project_sparse,
    project_to_bounded_rank,
    project_to_psd_bounded_rank,
    psd_delta_rank,
    run_solver,
    solvers,
    stationarity,
    tangent_project_bounded_rank,
    tangent_project_nonneg_sparse,
    tangent_project_psd,
    tangent_project_sparse,
)

__all__ = [
    "ConfigError",
    "delta_rank",
    "problems",
    "project_nonneg_sparse",
    "project_sparse",
    "project_to_bounded_rank",
    "project_to_psd_bounded_rank",
    "psd_delta_rank",
    "run_solver",
    "solvers",
    "stationarity",
    "tangent_project_bounded_rank",
    "tangent_project_nonneg_sparse",
    "tangent_project_psd",
    "tangent_project_sparse",
]
