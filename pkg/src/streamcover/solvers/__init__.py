"""Within-window solvers and the exact oracles that check them."""
from .oracles import (
    ORACLE_LIMIT,
    exact_cover,
    exact_udc_l2,
    exact_udc_linf,
    greedy_1d,
    min_set_cover,
)
from .window import (
    DELTA_MAX,
    SolverKind,
    WindowSolver,
    WindowSolverSpec,
    cover_expanded_disc,
    make_solver,
    run_solver,
    solver_capacity_bits,
    solver_finalize,
    solver_process,
)

__all__ = [
    "ORACLE_LIMIT", "exact_cover", "exact_udc_l2", "exact_udc_linf", "greedy_1d", "min_set_cover",
    "DELTA_MAX", "SolverKind", "WindowSolver", "WindowSolverSpec", "cover_expanded_disc",
    "make_solver", "run_solver", "solver_capacity_bits", "solver_finalize", "solver_process",
]
