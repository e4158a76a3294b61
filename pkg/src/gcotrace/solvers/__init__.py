from .base import DEFAULT_TIME_BUDGET, OBJECTIVE_SENSE, ObjectiveSense, Solution, SolverTimeout
from .exact import (
    GED_EXACT_LIMIT,
    MCS_EXACT_LIMIT,
    mapping_cost,
    solve,
    solve_components,
    solve_diameter,
    solve_distance,
    solve_ged,
    solve_mcp,
    solve_mcs,
    solve_mis,
    solve_mvc,
    solve_neighbor,
    solve_tsp,
    tour_weight,
)
from .heuristic import heuristic_solve
from .oracle import OracleLimitError, oracle_solve

__all__ = [
    "DEFAULT_TIME_BUDGET",
    "GED_EXACT_LIMIT",
    "MCS_EXACT_LIMIT",
    "OBJECTIVE_SENSE",
    "ObjectiveSense",
    "OracleLimitError",
    "Solution",
    "SolverTimeout",
    "heuristic_solve",
    "mapping_cost",
    "oracle_solve",
    "solve",
    "solve_components",
    "solve_diameter",
    "solve_distance",
    "solve_ged",
    "solve_mcp",
    "solve_mcs",
    "solve_mis",
    "solve_mvc",
    "solve_neighbor",
    "solve_tsp",
    "tour_weight",
]
