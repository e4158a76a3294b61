from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..graph import TaskKind
from ..solvers.base import Solution
from .spaces import StateThought, ThoughtId
from .templates import TEMPLATES, task_templates


@dataclass(frozen=True)
class ThoughtLine:
    thought_id: ThoughtId
    template_id: str
    rendered: str


@dataclass(frozen=True)
class ThoughtTrace:
    instance_id: str
    kind: TaskKind
    lines: tuple[ThoughtLine, ...]
    final_solution: Solution

    def __post_init__(self) -> None:
        if not self.lines or self.lines[-1].thought_id is not StateThought.S9:
            raise ValueError("a trace must end with its final-solution line")

    @property
    def text_lines(self) -> list[str]:
        return [line.rendered for line in self.lines]


def render_trace(trace: ThoughtTrace) -> str:
    """The trace as text, one line per thought, each terminated by a newline."""
    return "".join(line.rendered + "\n" for line in trace.lines)


class LineWriter:
    """Collects rendered lines, refusing templates that belong to another task."""

    def __init__(self, kind: TaskKind):
        self.kind = kind
        self._allowed = {t.id for t in task_templates(kind)}
        self.lines: list[ThoughtLine] = []

    def emit(self, template_id: str, **values: Any) -> None:
        if template_id not in self._allowed:
            raise KeyError(f"template {template_id} is not part of the {self.kind} program")
        tpl = TEMPLATES[template_id]
        self.lines.append(ThoughtLine(tpl.thought, tpl.id, tpl.render(**values)))

    def finish(self, instance_id: str, solution: Solution) -> ThoughtTrace:
        return ThoughtTrace(instance_id, self.kind, tuple(self.lines), solution)
