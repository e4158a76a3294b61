"""Validity checks, objectives, and the optimality metrics."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from ..graph import NP_HARD_TASKS, TaskInstance, TaskKind
from ..solvers.base import OBJECTIVE_SENSE, ObjectiveSense, Solution
from ..solvers.exact import bfs_distances, components, solve, tour_weight


class EmptyPoolWarning(UserWarning):
    """A rate was requested over zero outcomes."""


def _distinct_in_range(nodes: Sequence[int], n: int, what: str = "node") -> str:
    seen = set()
    for u in nodes:
        if not 0 <= u < n:
            return f"{what} {u} out of range"
        if u in seen:
            return f"{what} {u} repeated"
        seen.add(u)
    return ""


def _path_problem(inst: TaskInstance, path: Sequence[int]) -> str:
    g = inst.g
    bad = _distinct_in_range(path, g.n)
    if bad:
        return bad
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            return f"({a}, {b}) is not an edge"
    return ""


def validate_solution(inst: TaskInstance, sol: Solution) -> tuple[bool, str]:
    """Structural validity of ``sol`` for ``inst``; the reason is empty when valid."""
    reason = _problem(inst, sol)
    return (not reason, reason)


def _problem(inst: TaskInstance, sol: Solution) -> str:
    kind, g, nodes = inst.kind, inst.g, list(sol.nodes)
    if sol.kind is not kind:
        return f"expected a {kind} answer, got {sol.kind}"

    if kind is TaskKind.NEIGHBOR:
        a, b = inst.query  # type: ignore[misc]
        bad = _distinct_in_range(nodes, g.n)
        if bad:
            return bad
        for u in nodes:
            if not (g.has_edge(u, a) and g.has_edge(u, b)):
                return f"node {u} is not adjacent to both {a} and {b}"
        return ""

    if kind is TaskKind.DISTANCE:
        s, t = inst.query  # type: ignore[misc]
        if not nodes:
            return "" if bfs_distances(g, s)[t] < 0 else f"a path from {s} to {t} exists"
        if nodes[0] != s or nodes[-1] != t:
            return f"path must run from {s} to {t}"
        return _path_problem(inst, nodes)

    if kind is TaskKind.DIAMETER:
        if not nodes:
            return "empty path"
        bad = _path_problem(inst, nodes)
        if bad:
            return bad
        hops = bfs_distances(g, nodes[0])[nodes[-1]]
        if hops != len(nodes) - 1:
            return f"not a shortest path: its endpoints are {hops} apart"
        return ""

    if kind is TaskKind.CONNECTED:
        bad = _distinct_in_range(nodes, g.n)
        if bad:
            return bad
        comp_of = {}
        for k, comp in enumerate(components(g)):
            for u in comp:
                comp_of[u] = k
        seen: dict[int, int] = {}
        for u in nodes:
            if comp_of[u] in seen:
                return f"nodes {seen[comp_of[u]]} and {u} share a component"
            seen[comp_of[u]] = u
        return ""

    if kind in (TaskKind.MIS, TaskKind.MCP, TaskKind.MVC):
        bad = _distinct_in_range(nodes, g.n)
        if bad:
            return bad
        if kind is TaskKind.MIS:
            for u, v in combinations(nodes, 2):
                if g.has_edge(u, v):
                    return f"nodes {u} and {v} are adjacent"
        elif kind is TaskKind.MCP:
            for u, v in combinations(nodes, 2):
                if not g.has_edge(u, v):
                    return f"nodes {u} and {v} are not adjacent"
        else:
            chosen = set(nodes)
            for u, v in g.edges:
                if u not in chosen and v not in chosen:
                    return f"edge ({u}, {v}) is not covered"
        return ""

    if kind is TaskKind.TSP:
        cycle = nodes[:-1] if len(nodes) > 1 and nodes[0] == nodes[-1] else nodes
        if sorted(cycle) != list(range(g.n)):
            return "tour must visit every node exactly once"
        return ""

    if kind is TaskKind.MCS:
        h = inst.h
        assert h is not None
        other = list(sol.h_nodes or ())
        if len(nodes) != len(other):
            return "node lists differ in length"
        bad = _distinct_in_range(nodes, g.n, "G node") or _distinct_in_range(other, h.n, "H node")
        if bad:
            return bad
        for i, j in combinations(range(len(nodes)), 2):
            if g.has_edge(nodes[i], nodes[j]) != h.has_edge(other[i], other[j]):
                return f"pairs ({nodes[i]}, {other[i]}) and ({nodes[j]}, {other[j]}) disagree on adjacency"
        return ""

    if kind is TaskKind.GED:
        h = inst.h
        assert h is not None
        if len(nodes) != g.n or sorted(nodes) != list(range(h.n)):
            return "mapping must be a bijection onto the nodes of H"
        return ""

    raise AssertionError(kind)


def objective_value(inst: TaskInstance, sol: Solution) -> int:
    valid, reason = validate_solution(inst, sol)
    if not valid:
        raise ValueError(f"invalid solution: {reason}")
    kind, nodes = inst.kind, list(sol.nodes)
    if kind in (TaskKind.DISTANCE, TaskKind.DIAMETER):
        return max(len(nodes) - 1, 0)
    if kind is TaskKind.TSP:
        if len(nodes) > 1 and nodes[0] != nodes[-1]:
            nodes = nodes + nodes[:1]
        return tour_weight(inst.g, nodes)
    if kind is TaskKind.GED:
        from ..solvers.exact import mapping_cost

        assert inst.h is not None
        return mapping_cost(inst.g, inst.h, nodes)
    return len(nodes)


def optimum_value(inst: TaskInstance) -> int:
    """Objective of the exact solver's answer (0 for an unreachable Distance target)."""
    sol = solve(inst)
    if sol is None:
        return 0
    return objective_value(inst, sol)


def ratio_of(value: float, optimum: float) -> float:
    """min(opt/value, value/opt) with 0/0 -> 1 and x/0 -> 0."""
    if value == optimum:
        return 1.0
    if value <= 0 or optimum <= 0:
        return 0.0
    return min(optimum / value, value / optimum)


def at_least_as_good(kind: TaskKind, value: float, reference: float) -> bool:
    """Whether ``value`` matches the reference optimum.

    The reference comes from a budgeted search on the largest MCS and GED
    instances, so an answer that beats it also counts as optimal.
    """
    sense = OBJECTIVE_SENSE[kind]
    if sense is ObjectiveSense.MAX:
        return value >= reference
    if sense is ObjectiveSense.MIN:
        return value <= reference
    return value == reference


def optimality_ratio(inst: TaskInstance, sol: Solution | None, optimum: float) -> float:
    if inst.kind not in NP_HARD_TASKS:
        raise ValueError(f"optimality ratio is defined for NP-hard tasks only, not {inst.kind}")
    if sol is None or not validate_solution(inst, sol)[0]:
        return 0.0
    value = objective_value(inst, sol)
    return 1.0 if at_least_as_good(inst.kind, value, optimum) else ratio_of(value, optimum)


@dataclass(frozen=True)
class EvalOutcome:
    parsed: Solution | None
    valid: bool
    reason: str
    objective: int | None
    optimal: bool
    ratio: float


def evaluate(inst: TaskInstance, answer: str | Solution | None, optimum: int | None = None) -> EvalOutcome:
    """Parse (if given text), validate and score one answer.

    Polynomial tasks have no ratio of their own; their ``ratio`` is 1 for an
    optimal answer and 0 otherwise so that rates and ratios stay comparable.
    """
    from .parse import parse_answer

    sol = parse_answer(inst.kind, answer) if isinstance(answer, str) else answer
    if sol is None:
        return EvalOutcome(None, False, "no answer found", None, False, 0.0)
    valid, reason = validate_solution(inst, sol)
    if not valid:
        return EvalOutcome(sol, False, reason, None, False, 0.0)
    value = objective_value(inst, sol)
    if optimum is None:
        optimum = optimum_value(inst)
    optimal = at_least_as_good(inst.kind, value, optimum)
    if inst.kind in NP_HARD_TASKS:
        ratio = 1.0 if optimal else ratio_of(value, optimum)
    else:
        ratio = 1.0 if optimal else 0.0
    return EvalOutcome(sol, True, "", value, optimal, ratio)


def optimality_rate(outcomes: Iterable[EvalOutcome]) -> float:
    pool = list(outcomes)
    if not pool:
        warnings.warn("optimality rate over an empty pool is reported as 0", EmptyPoolWarning, stacklevel=2)
        return 0.0
    return sum(o.optimal for o in pool) / len(pool)


def best_of_n(inst: TaskInstance, candidates: Sequence[str | Solution | None], optimum: int | None = None) -> EvalOutcome:
    """Highest-ratio outcome among the candidates, earliest on ties."""
    if not candidates:
        raise ValueError("best_of_n needs at least one candidate")
    if optimum is None:
        optimum = optimum_value(inst)
    best: EvalOutcome | None = None
    for cand in candidates:
        outcome = evaluate(inst, cand, optimum)
        if best is None or outcome.ratio > best.ratio:
            best = outcome
    assert best is not None
    return best
