from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

from ..graph import TaskKind

DEFAULT_TIME_BUDGET = 10.0


class ObjectiveSense(str, Enum):
    MAX = "max"
    MIN = "min"
    EXACT = "exact"


OBJECTIVE_SENSE = {
    TaskKind.NEIGHBOR: ObjectiveSense.MAX,
    TaskKind.DISTANCE: ObjectiveSense.MIN,
    TaskKind.CONNECTED: ObjectiveSense.EXACT,
    TaskKind.DIAMETER: ObjectiveSense.EXACT,
    TaskKind.MCP: ObjectiveSense.MAX,
    TaskKind.MIS: ObjectiveSense.MAX,
    TaskKind.MVC: ObjectiveSense.MIN,
    TaskKind.MCS: ObjectiveSense.MAX,
    TaskKind.GED: ObjectiveSense.MIN,
    TaskKind.TSP: ObjectiveSense.MIN,
}


@dataclass(frozen=True)
class Solution:
    """A candidate answer; its shape depends on ``kind``.

    * node sets (Neighbor, Connected, MCP, MIS, MVC): ``nodes`` in the order given
    * paths (Distance, Diameter) and closed tours (TSP): ``nodes`` in visiting order
    * GED mapping: ``nodes[i]`` is the image of node ``i`` of G
    * MCS: ``nodes`` from G paired index-wise with ``h_nodes`` from H

    ``exact`` is solver bookkeeping (False when a budgeted or heuristic
    search produced it) and does not take part in equality.
    """

    kind: TaskKind
    nodes: tuple[int, ...] = ()
    h_nodes: tuple[int, ...] | None = None
    exact: bool = field(default=True, compare=False)

    def as_text_lists(self) -> str:
        from ..graph import fmt_list

        if self.kind is TaskKind.MCS:
            return f"{fmt_list(self.nodes)}, {fmt_list(self.h_nodes or ())}"
        return fmt_list(self.nodes)


class SolverTimeout(RuntimeError):
    """Exact search exceeded its time budget."""


class Deadline:
    __slots__ = ("limit", "_ticks")

    def __init__(self, budget: float | None):
        self.limit = None if budget is None else time.monotonic() + budget
        self._ticks = 0

    def check(self) -> None:
        self._ticks += 1
        if self.limit is not None and self._ticks & 0x3FF == 0 and time.monotonic() > self.limit:
            raise SolverTimeout("exact search exceeded its time budget")
