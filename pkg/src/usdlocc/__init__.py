"""Unambiguous discrimination of two-qubit states under one-way announcements.

Solvers for two-sided and one-sided local measurement schemes, a
no-communication classifier, a reproducible Monte Carlo sampler, and a
secret-sharing session simulator built on the discrimination primitive.
"""

from .errors import (
    ConfigError,
    ConstraintViolated,
    DomainError,
    IdenticalStates,
    Infeasible,
    NotDetectorCase,
    ProductState,
    ResidualTooLarge,
    ZeroVector,
)
from .onefail import one_fail_feasible, solve_one_fail_same_basis
from .qlin import schmidt_decompose
from .sampler import RngSpec, run_trials, verify_scheme
from .states import StatePair, idp_bound, make_state, qss_pair, same_basis_pair, xz_pair
from .twofail import Label, failure_report, solve, zero_failure_feasible

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConstraintViolated",
    "DomainError",
    "IdenticalStates",
    "Infeasible",
    "Label",
    "NotDetectorCase",
    "ProductState",
    "ResidualTooLarge",
    "RngSpec",
    "StatePair",
    "ZeroVector",
    "__version__",
    "failure_report",
    "idp_bound",
    "make_state",
    "one_fail_feasible",
    "qss_pair",
    "run_trials",
    "same_basis_pair",
    "schmidt_decompose",
    "solve",
    "solve_one_fail_same_basis",
    "verify_scheme",
    "xz_pair",
]
