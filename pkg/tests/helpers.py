"""Test utilities that deliberately avoid the package's own solvers and scorers."""
from __future__ import annotations

import json
import random
import re
from itertools import combinations
from pathlib import Path

from gcotrace.graph import TaskInstance, TaskKind, parse_instance_text

DATA = Path(__file__).parent / "data"


def worked_examples() -> list[tuple[TaskKind, TaskInstance, list[str]]]:
    out = []
    for e in json.loads((DATA / "worked_examples.json").read_text()):
        kind = TaskKind.parse(e["task"])
        out.append((kind, parse_instance_text(e["input"], kind, f"example-{kind.value}"), e["output"]))
    return out


def worked_example(kind: TaskKind) -> tuple[TaskInstance, list[str]]:
    for k, inst, lines in worked_examples():
        if k is kind:
            return inst, lines
    raise KeyError(kind)


def _pairs(edges) -> set[tuple[int, int]]:
    return {(u, v) for u, v in edges} | {(v, u) for u, v in edges}


def plain_objective(inst: TaskInstance, sol) -> int:
    """Objective recomputed straight from the edge lists."""
    kind, nodes = inst.kind, list(sol.nodes)
    if kind in (TaskKind.DISTANCE, TaskKind.DIAMETER):
        return max(len(nodes) - 1, 0)
    if kind is TaskKind.TSP:
        w = {}
        for (u, v), x in zip(inst.g.edges, inst.g.weights):
            w[(u, v)] = w[(v, u)] = x
        if nodes and nodes[0] != nodes[-1]:
            nodes = nodes + nodes[:1]
        return sum(w[(a, b)] for a, b in zip(nodes, nodes[1:]))
    if kind is TaskKind.GED:
        g, h = inst.g, inst.h
        ga, ha = _pairs(g.edges), _pairs(h.edges)
        cost = sum(g.labels[i] != h.labels[j] for i, j in enumerate(nodes))
        cost += sum(((i, j) in ga) != ((nodes[i], nodes[j]) in ha) for i, j in combinations(range(len(nodes)), 2))
        return cost
    return len(nodes)


def mutate_number(text: str, rng: random.Random, bound: int) -> str:
    """Replace one randomly chosen integer token with a different value."""
    tokens = list(re.finditer(r"\d+", text))
    m = rng.choice(tokens)
    old = int(m.group())
    new = old
    while new == old:
        new = rng.randrange(0, max(bound, old + 2) + 1)
    return text[: m.start()] + str(new) + text[m.end():]
