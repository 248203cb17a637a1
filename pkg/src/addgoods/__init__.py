"""Exact solvers for eliminating envy by adding copies of pool goods."""
from .arith import BezoutCertificate, bezout_list, ceil_div, gcd_list
from .bounded import dispatch, solve_branching, solve_hybrid, solve_ilp_bb
from .model import (
    EMPTY,
    INF,
    EnvyGraph,
    Extension,
    Instance,
    InstanceError,
    PoolItem,
    Verdict,
    envy_gap,
    envy_graph,
    is_envy_free,
    sum_finite_supplies,
    validate_extension,
)
from .oracle_gen import oracle_bounded
from .unbounded import solve_unbounded

__all__ = [
    "BezoutCertificate", "bezout_list", "ceil_div", "gcd_list",
    "dispatch", "solve_branching", "solve_hybrid", "solve_ilp_bb",
    "EMPTY", "INF", "EnvyGraph", "Extension", "Instance", "InstanceError", "PoolItem", "Verdict",
    "envy_gap", "envy_graph", "is_envy_free", "sum_finite_supplies", "validate_extension",
    "oracle_bounded", "solve_unbounded",
]
