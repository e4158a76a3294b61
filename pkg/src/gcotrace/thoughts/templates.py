"""Line templates for every trace the generators emit.

Each template is a format string whose placeholders carry a type; the same
definition drives rendering and parsing, so the two cannot drift apart.
Placeholders may repeat inside one template, in which case every occurrence
must carry the same value.
"""
from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

from ..graph import TaskKind
from .spaces import ActionThought as A
from .spaces import StateThought as S
from .spaces import ThoughtId

_INT = r"\d+"
_NODES = r"\[(?:\d+(?:, \d+)*)?\]"
_EDGES = r"\[(?:\(\d+, \d+\)(?:, \(\d+, \d+\))*)?\]"
_LABEL = r"[A-Za-z]+"

FIELD_PATTERNS = {"int": _INT, "nodes": _NODES, "edges": _EDGES, "label": _LABEL}

# Placeholder name -> type.  Names not listed are plain integers.
_FIELD_TYPES = {
    "nodes": "nodes",
    "path": "nodes",
    "idx": "nodes",
    "others": "nodes",
    "other_idx": "nodes",
    "g_nodes": "nodes",
    "h_nodes": "nodes",
    "edges": "edges",
    "lg": "label",
    "lh": "label",
}


def field_type(name: str) -> str:
    return _FIELD_TYPES.get(name, "int")


def _fmt_value(kind: str, value: Any) -> str:
    if kind == "int":
        return str(int(value))
    if kind == "nodes":
        return "[" + ", ".join(str(int(x)) for x in value) + "]"
    if kind == "edges":
        return "[" + ", ".join(f"({int(u)}, {int(v)})" for u, v in value) + "]"
    return str(value)


def _parse_value(kind: str, text: str) -> Any:
    if kind == "int":
        return int(text)
    if kind == "nodes":
        return [int(x) for x in re.findall(r"\d+", text)]
    if kind == "edges":
        return [(int(u), int(v)) for u, v in re.findall(r"\((\d+), (\d+)\)", text)]
    return text


@dataclass(frozen=True)
class LineTemplate:
    id: str
    thought: ThoughtId
    fmt: str
    fields: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        names: list[str] = []
        for _, name, _, _ in string.Formatter().parse(self.fmt):
            if name is not None and name not in names:
                names.append(name)
        object.__setattr__(self, "fields", tuple(names))

    @cached_property
    def pattern(self) -> re.Pattern[str]:
        parts = []
        seen: set[str] = set()
        for literal, name, _, _ in string.Formatter().parse(self.fmt):
            parts.append(re.escape(literal))
            if name is None:
                continue
            if name in seen:
                parts.append(f"(?P={name})")
            else:
                seen.add(name)
                parts.append(f"(?P<{name}>{FIELD_PATTERNS[field_type(name)]})")
        return re.compile("".join(parts))

    def render(self, **values: Any) -> str:
        if set(values) != set(self.fields):
            raise KeyError(f"template {self.id} takes {self.fields}, got {sorted(values)}")
        return self.fmt.format(**{k: _fmt_value(field_type(k), v) for k, v in values.items()})

    def match(self, line: str) -> dict[str, Any] | None:
        m = self.pattern.fullmatch(line)
        if m is None:
            return None
        return {k: _parse_value(field_type(k), m.group(k)) for k in self.fields}


def _t(id: str, thought: ThoughtId, fmt: str) -> LineTemplate:
    return LineTemplate(id, thought, fmt)


FINISHED = _t("finished", S.S1, "Finished!")

_NEIGHBOR = (
    _t("neighbor.adjacent", S.S6, "The neighboring nodes of the node {v}: {nodes}."),
    _t("neighbor.final", S.S9, "The common neighbor nodes of the two nodes are: {nodes}."),
)

_DISTANCE = (
    _t("distance.expand", A.A3, "Current path: {path}, the neighboring nodes of the node {v}: {nodes}."),
    _t("distance.found", S.S1, "Found the target node {t}."),
    _t("distance.final", S.S9, "The shortest path is {path}."),
)

_CONNECTED = (
    _t("connected.start", A.A2, "Choose node {u} as the start point of the current connectivity component."),
    _t("connected.visit", A.A3, "Add node {v} into the connected component list."),
    _t(
        "connected.enqueue",
        S.S6,
        "Add the unvisited neighboring nodes of the node {v} into the search queue: {nodes}.",
    ),
    _t("connected.current", S.S8, "The current connected component is: {nodes}."),
    FINISHED,
    _t("connected.component", S.S8, "Connected component {k}: Nodes = {nodes}, Representative node = {r}."),
    _t("connected.final", S.S9, "The representative nodes for each connected component are: {nodes}."),
)

_DIAMETER = (
    _t("diameter.source", A.A2, "Choose the most appropriate node as source node of the diameter path: {s}."),
    _t(
        "diameter.start",
        S.S1,
        "Calculating the longest path among all the shortest paths from the graph and source node {s}.",
    ),
    _t("diameter.adjacent", S.S6, "The neighboring nodes of the node {v}: {nodes}."),
    _t("diameter.update", A.A3, "Update the shortest path from source node to node {nodes} with distance {d}."),
    _t("diameter.farthest", S.S8, "The farthest target from the source {s} is node {t} with distance {d}."),
    _t("diameter.final", S.S9, "The diameter path is {path}."),
)

_MVC = (
    _t("mvc.isolated", S.S3, "Remove isolated nodes: {nodes}."),
    _t("mvc.add", A.A1, "Add the most appropriate node: {u}."),
    _t("mvc.current", S.S8, "The current Vertex Cover is: {nodes}."),
    _t("mvc.edges", S.S5, "Remove the edges of node {u}: {edges}."),
    _t("mvc.empty", S.S7, "There is no edge left in the graph."),
    FINISHED,
    _t("mvc.final", S.S9, "The minimum vertex cover is {nodes}."),
)

_MIS = (
    _t("mis.isolated", A.A3, "Add isolated nodes: {nodes}."),
    _t("mis.add", A.A1, "Add the most appropriate node: {u}."),
    _t("mis.current", S.S8, "The current Independent Set is: {nodes}."),
    _t("mis.remove", S.S3, "Remove the neighboring nodes of the node {u}: {nodes}."),
    _t("mis.remaining", S.S6, "The remaining nodes of the graph are: {nodes}."),
    FINISHED,
    _t("mis.final", S.S9, "The maximum independent set is {nodes}."),
)

_MCP = (
    _t("mcp.add", A.A1, "Add the most appropriate node: {u}."),
    _t("mcp.current", S.S8, "The current clique is: {nodes}."),
    _t("mcp.common", S.S6, "The common neighbors of nodes in the current clique are: {nodes}."),
    FINISHED,
    _t("mcp.final", S.S9, "The maximum clique is {nodes}."),
)

_TSP = (
    _t("tsp.start", A.A1, "Choose starting node: {u}."),
    _t("tsp.hop", A.A1, "Choose node {v} after node {u} with weight {w}."),
    _t("tsp.current", S.S8, "The current subtour is {path}."),
    FINISHED,
    _t("tsp.final", S.S9, "The optimal solution of TSP is: {path}."),
)


def _mcs_side(side: str, graph: str) -> tuple[LineTemplate, ...]:
    lead = f"In sub_{side}_nodes, node {{u}}"
    return (
        _t(f"mcs.{side}_none", S.S6, f"{lead} does not connect any node."),
        _t(f"mcs.{side}_all", S.S6, f"{lead} connects all nodes which are {{nodes}} in {graph}."),
        _t(
            f"mcs.{side}_some",
            S.S6,
            f"{lead} connects nodes of indices {{idx}} which are {{nodes}} in {graph}, "
            f"and does not connect nodes of indices {{other_idx}} which are {{others}} in {graph}.",
        ),
    )


_MCS = (
    _t("mcs.first", A.A1, "Choose node {u} of G, and node {v} of H that has a similar neighborhood structure."),
    _t("mcs.current", S.S8, "The current nodes lists of subgraphs are: {g_nodes}, {h_nodes}."),
    *_mcs_side("g", "G"),
    *_mcs_side("h", "H"),
    _t(
        "mcs.choose",
        A.A1,
        "So choose node {u} of G, and node {v} of H as indices of their individual neighbors "
        "in the corresponding nodes lists are the same.",
    ),
    FINISHED,
    _t("mcs.final", S.S9, "The optimal solution of MCS is: {g_nodes}, {h_nodes}."),
)

_GED = (
    _t("ged.map", A.A1, "Mapping node {i} labeled <{lg}> of graph G to node {j} labeled <{lh}> of graph H."),
    _t("ged.same", S.S6, "As the mapping two nodes {i}~{j} have the same label, the node mapping cost adds 0."),
    _t("ged.diff", S.S6, "As the mapping two nodes {i}~{j} have different labels, the node mapping cost adds 1."),
    _t(
        "ged.insert",
        S.S7,
        "Currently for any index u of {nodes}, node u does not connect node {i} in graph G, "
        "but map(u)=L[u] connects to map({i})={j} in graph H, "
        "so the new node mapping {i}~{j} generate edge addition cost {c}.",
    ),
    _t(
        "ged.delete",
        S.S7,
        "Currently for any index u in {nodes}, node u connects node {i} in graph G, "
        "but map(u)=L[u] does not connect to map({i})={j} in graph H, "
        "so the new node mapping {i}~{j} generate edge deletion cost {c}.",
    ),
    _t("ged.current", S.S8, "The current mapping is {nodes} with cost {c}."),
    FINISHED,
    _t("ged.final", S.S9, "The optimal mapping of GED is: {nodes}."),
)

_BY_TASK: dict[TaskKind, tuple[LineTemplate, ...]] = {
    TaskKind.NEIGHBOR: _NEIGHBOR,
    TaskKind.DISTANCE: _DISTANCE,
    TaskKind.CONNECTED: _CONNECTED,
    TaskKind.DIAMETER: _DIAMETER,
    TaskKind.MVC: _MVC,
    TaskKind.MIS: _MIS,
    TaskKind.MCP: _MCP,
    TaskKind.TSP: _TSP,
    TaskKind.MCS: _MCS,
    TaskKind.GED: _GED,
}

TEMPLATES: dict[str, LineTemplate] = {}
for _group in _BY_TASK.values():
    for _tpl in _group:
        TEMPLATES.setdefault(_tpl.id, _tpl)


def task_templates(kind: TaskKind) -> tuple[LineTemplate, ...]:
    return _BY_TASK[kind]


def final_template(kind: TaskKind) -> LineTemplate:
    return _BY_TASK[kind][-1]


def match_line(kind: TaskKind, line: str, allowed: Sequence[str] | None = None) -> tuple[LineTemplate, dict[str, Any]] | None:
    """First template of ``kind`` (optionally restricted to ``allowed`` ids) matching ``line``."""
    for tpl in _BY_TASK[kind]:
        if allowed is not None and tpl.id not in allowed:
            continue
        values = tpl.match(line)
        if values is not None:
            return tpl, values
    return None


def grammar_markdown() -> str:
    """Reference listing of every template, grouped by task."""
    out = ["# Trace line grammar", ""]
    out.append("Placeholder types: `int` is a decimal integer, `nodes` a list such as `[0, 3, 4]`,")
    out.append("`edges` a list such as `[(1, 5), (1, 6)]`, `label` an alphabetic atom label.")
    out.append("A placeholder that appears twice in one line must carry the same value both times.")
    out.append("")
    for kind, group in _BY_TASK.items():
        out.append(f"## {kind.value}")
        out.append("")
        out.append("| template | thought | line | placeholders |")
        out.append("|---|---|---|---|")
        for tpl in group:
            ph = ", ".join(f"`{n}`: {field_type(n)}" for n in tpl.fields) or "none"
            out.append(f"| `{tpl.id}` | {tpl.thought.value} | `{tpl.fmt}` | {ph} |")
        out.append("")
    return "\n".join(out)
