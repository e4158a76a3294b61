from .parse import parse_answer
from .report import Cell, Report, aggregate_report
from .scoring import (
    EmptyPoolWarning,
    EvalOutcome,
    at_least_as_good,
    best_of_n,
    evaluate,
    objective_value,
    optimality_rate,
    optimality_ratio,
    optimum_value,
    ratio_of,
    validate_solution,
)

__all__ = [
    "Cell",
    "EmptyPoolWarning",
    "EvalOutcome",
    "Report",
    "aggregate_report",
    "at_least_as_good",
    "best_of_n",
    "evaluate",
    "objective_value",
    "optimality_rate",
    "optimality_ratio",
    "optimum_value",
    "parse_answer",
    "ratio_of",
    "validate_solution",
]
