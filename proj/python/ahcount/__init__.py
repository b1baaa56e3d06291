"""Python interface to the ahcount eigenvalue-counting library."""

from ._ahcount import (
    BoundaryCondition,
    ConfigError,
    DomainError,
    Family,
    PotentialSpec,
    auto_rho0,
    count_eigenvalues,
    cumulative_multiplicity,
    eval_Q,
    iter_log,
    oracle_count,
    prufer_count,
    run_sweep,
    sphere_mode,
    tail_certificate,
    truncation_point,
    zeta_breakpoints,
)

__all__ = [
    "BoundaryCondition",
    "ConfigError",
    "DomainError",
    "Family",
    "PotentialSpec",
    "auto_rho0",
    "count_eigenvalues",
    "cumulative_multiplicity",
    "eval_Q",
    "iter_log",
    "oracle_count",
    "prufer_count",
    "run_sweep",
    "sphere_mode",
    "tail_certificate",
    "truncation_point",
    "zeta_breakpoints",
]
