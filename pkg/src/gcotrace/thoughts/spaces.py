"""Action and state thought vocabularies, per-task selection, and programs."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Callable

from ..graph import TaskInstance, TaskKind

if TYPE_CHECKING:
    from ..solvers.base import Solution
    from .trace import ThoughtTrace


class Target(str, Enum):
    NODES = "nodes"
    EDGES = "edges"


class Direction(str, Enum):
    ADD = "add"
    REMOVE = "remove"


class Basis(str, Enum):
    GIVEN_OPTIMAL = "given-optimal"
    RULE = "rule"
    SIMPLE_PRIOR = "simple-prior"
    COMPLEX_PRIOR = "complex-prior"


_BASES = list(Basis)


class ActionThought(str, Enum):
    """The sixteen operations on a partial solution.

    Numbering walks target (nodes, edges), then direction (add, remove), then
    basis in the order of :class:`Basis`.
    """

    A1 = "a1"
    A2 = "a2"
    A3 = "a3"
    A4 = "a4"
    A5 = "a5"
    A6 = "a6"
    A7 = "a7"
    A8 = "a8"
    A9 = "a9"
    A10 = "a10"
    A11 = "a11"
    A12 = "a12"
    A13 = "a13"
    A14 = "a14"
    A15 = "a15"
    A16 = "a16"

    @property
    def _index(self) -> int:
        return int(self.value[1:]) - 1

    @property
    def target(self) -> Target:
        return Target.NODES if self._index < 8 else Target.EDGES

    @property
    def direction(self) -> Direction:
        return Direction.ADD if self._index % 8 < 4 else Direction.REMOVE

    @property
    def basis(self) -> Basis:
        return _BASES[self._index % 4]

    @classmethod
    def lookup(cls, target: Target, direction: Direction, basis: Basis) -> "ActionThought":
        idx = (0 if target is Target.NODES else 8) + (0 if direction is Direction.ADD else 4) + _BASES.index(basis)
        return list(cls)[idx]


class StateThought(str, Enum):
    """Descriptions of the evolving instance or solution."""

    S1 = "s1"  # solving state (progress flags such as "Finished!")
    S2 = "s2"  # nodes added to the graph
    S3 = "s3"  # nodes removed from the graph
    S4 = "s4"  # edges added to the graph
    S5 = "s5"  # edges removed from the graph
    S6 = "s6"  # current node set / neighborhoods
    S7 = "s7"  # current edge set / edge-level facts
    S8 = "s8"  # current partial solution
    S9 = "s9"  # final solution

    @property
    def role(self) -> str:
        return _STATE_ROLES[self]


_STATE_ROLES = {
    StateThought.S1: "solving-state",
    StateThought.S2: "add-nodes",
    StateThought.S3: "remove-nodes",
    StateThought.S4: "add-edges",
    StateThought.S5: "remove-edges",
    StateThought.S6: "graph-node-set",
    StateThought.S7: "graph-edge-set",
    StateThought.S8: "current-solution",
    StateThought.S9: "final-solution",
}

ThoughtId = ActionThought | StateThought


class Mode(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @classmethod
    def for_task(cls, kind: TaskKind) -> "Mode":
        return cls.FORWARD if kind.polynomial else cls.BACKWARD


SOLUTION_DRIVEN = frozenset(
    {TaskKind.DIAMETER, TaskKind.MVC, TaskKind.MIS, TaskKind.MCP, TaskKind.TSP, TaskKind.MCS, TaskKind.GED}
)

GIVEN_OPTIMAL_ACTIONS = frozenset(a for a in ActionThought if a.basis is Basis.GIVEN_OPTIMAL)


class ProgramError(ValueError):
    """A thought selection that cannot be assembled into a program."""


def select_thoughts(kind: TaskKind) -> tuple[frozenset[ActionThought], frozenset[StateThought]]:
    """The action and state thoughts used by the task's line templates."""
    from .templates import task_templates

    ids = {t.thought for t in task_templates(kind)}
    actions = frozenset(t for t in ids if isinstance(t, ActionThought))
    states = frozenset(t for t in ids if isinstance(t, StateThought))
    return actions, states


@dataclass(frozen=True)
class ThoughtProgram:
    kind: TaskKind
    mode: Mode
    actions: frozenset[ActionThought]
    states: frozenset[StateThought]
    templates: tuple[str, ...]
    _runner: Callable[..., "ThoughtTrace"] = field(repr=False, compare=False)

    def run(self, inst: TaskInstance, solution: "Solution | None" = None) -> "ThoughtTrace":
        """Execute on ``inst``.

        Programs that replay a solver answer (all backward programs, and the
        diameter program for its source choice) accept that answer as
        ``solution``; without it they ask the exact solver.
        """
        if inst.kind is not self.kind:
            raise ProgramError(f"{self.kind} program cannot run a {inst.kind} instance")
        if solution is None:
            return self._runner(inst)
        if self.kind not in SOLUTION_DRIVEN:
            raise ProgramError(f"{self.kind} traces derive their own answer")
        return self._runner(inst, solution)


def construct_program(
    kind: TaskKind,
    actions: frozenset[ActionThought] | set[ActionThought],
    states: frozenset[StateThought] | set[StateThought],
    mode: Mode,
) -> ThoughtProgram:
    """Bind a thought selection to the task's line templates.

    The selection must cover every thought the task's templates emit and may
    not contain thoughts the task never emits.  Backward programs need exactly
    one given-optimal node-adding action; forward programs none at all.
    """
    from .generators import GENERATORS
    from .templates import task_templates

    actions = frozenset(actions)
    states = frozenset(states)
    if mode is not Mode.for_task(kind):
        raise ProgramError(f"{kind} traces are built in {Mode.for_task(kind).value} mode, not {mode.value}")
    given = actions & GIVEN_OPTIMAL_ACTIONS
    if mode is Mode.BACKWARD:
        adding = {a for a in given if a.target is Target.NODES and a.direction is Direction.ADD}
        if len(adding) != 1 or given != adding:
            raise ProgramError("backward programs need exactly one given-optimal node-adding action")
    elif given:
        raise ProgramError("forward programs cannot use given-optimal actions")
    templates = task_templates(kind)
    needed = {t.thought for t in templates}
    chosen = set(actions) | set(states)
    if needed - chosen:
        missing = ", ".join(sorted(t.value for t in needed - chosen))
        raise ProgramError(f"{kind} needs thoughts {missing}")
    if chosen - needed:
        extra = ", ".join(sorted(t.value for t in chosen - needed))
        raise ProgramError(f"{kind} has no template for thoughts {extra}")
    return ThoughtProgram(kind, mode, actions, states, tuple(t.id for t in templates), GENERATORS[kind])


def default_program(kind: TaskKind) -> ThoughtProgram:
    actions, states = select_thoughts(kind)
    return construct_program(kind, actions, states, Mode.for_task(kind))
