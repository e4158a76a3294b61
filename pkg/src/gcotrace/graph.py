"""Graphs, task instances, the instance text grammar and synthetic sampling."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class TaskKind(str, Enum):
    NEIGHBOR = "Neighbor"
    DISTANCE = "Distance"
    CONNECTED = "Connected"
    DIAMETER = "Diameter"
    MCP = "MCP"
    MIS = "MIS"
    MVC = "MVC"
    MCS = "MCS"
    GED = "GED"
    TSP = "TSP"

    @classmethod
    def parse(cls, name: str) -> "TaskKind":
        for kind in cls:
            if kind.value.lower() == name.strip().lower():
                return kind
        raise ValueError(f"unknown task {name!r}")

    @property
    def polynomial(self) -> bool:
        return self in POLYNOMIAL_TASKS

    def __str__(self) -> str:
        return self.value


POLYNOMIAL_TASKS = frozenset(
    {TaskKind.NEIGHBOR, TaskKind.DISTANCE, TaskKind.CONNECTED, TaskKind.DIAMETER}
)
NP_HARD_TASKS = frozenset(set(TaskKind) - POLYNOMIAL_TASKS)
TWO_GRAPH_TASKS = frozenset({TaskKind.MCS, TaskKind.GED})
QUERY_TASKS = frozenset({TaskKind.NEIGHBOR, TaskKind.DISTANCE})


class SizeClass(str, Enum):
    SMALL = "Small"
    LARGE = "Large"

    @classmethod
    def parse(cls, name: str) -> "SizeClass":
        for size in cls:
            if size.value.lower() == name.strip().lower():
                return size
        raise ValueError(f"unknown size class {name!r}")

    def node_range(self, kind: TaskKind) -> tuple[int, int]:
        return SIZE_RANGES[kind][self]

    def __str__(self) -> str:
        return self.value


_NEAR = {SizeClass.SMALL: (4, 19), SizeClass.LARGE: (20, 50)}
_MID = {SizeClass.SMALL: (4, 14), SizeClass.LARGE: (15, 30)}
_PAIR = {SizeClass.SMALL: (4, 9), SizeClass.LARGE: (10, 20)}

SIZE_RANGES: dict[TaskKind, dict[SizeClass, tuple[int, int]]] = {
    TaskKind.NEIGHBOR: _NEAR,
    TaskKind.DISTANCE: _NEAR,
    TaskKind.CONNECTED: _MID,
    TaskKind.DIAMETER: _MID,
    TaskKind.MCP: _MID,
    TaskKind.MIS: _MID,
    TaskKind.MVC: _MID,
    TaskKind.MCS: _PAIR,
    TaskKind.GED: _PAIR,
    TaskKind.TSP: _PAIR,
}


def size_class_for(kind: TaskKind, n: int) -> SizeClass | None:
    for size in SizeClass:
        lo, hi = SIZE_RANGES[kind][size]
        if lo <= n <= hi:
            return size
    return None


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    ``edges`` is kept sorted with ``u < v``.  ``weights`` (TSP) is aligned
    with ``edges``; ``labels`` (GED) is indexed by node.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    weights: tuple[int, ...] | None = None
    labels: tuple[str, ...] | None = None
    removed: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError(f"negative node count {self.n}")
        if any(not 0 <= u < self.n for u in self.removed):
            raise GraphError("removed node out of range")
        normalized = []
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) out of range for {self.n} nodes")
            if u in self.removed or v in self.removed:
                raise GraphError(f"edge ({u}, {v}) touches a removed node")
            normalized.append((u, v) if u < v else (v, u))
        weights = self.weights
        if weights is not None:
            if len(weights) != len(normalized):
                raise GraphError("weights must align with edges")
            if any(w <= 0 for w in weights):
                raise GraphError("weights must be positive integers")
            order = sorted(range(len(normalized)), key=normalized.__getitem__)
            normalized = [normalized[i] for i in order]
            weights = tuple(int(weights[i]) for i in order)
        else:
            normalized.sort()
        for a, b in zip(normalized, normalized[1:]):
            if a == b:
                raise GraphError(f"duplicate edge {a}")
        if self.labels is not None and len(self.labels) != self.n:
            raise GraphError("every node needs a label")
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "weights", weights)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def nodes(self) -> list[int]:
        """Live node identifiers, ascending."""
        return [u for u in range(self.n) if u not in self.removed]

    @classmethod
    def from_weight_map(cls, n: int, weights: Mapping[tuple[int, int], int]) -> "Graph":
        edges = list(weights)
        return cls(n, tuple(edges), tuple(weights[e] for e in edges))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    @cached_property
    def weight_map(self) -> dict[tuple[int, int], int]:
        if self.weights is None:
            return {}
        return dict(zip(self.edges, self.weights))

    def has_edge(self, u: int, v: int) -> bool:
        return (self.adj_masks[u] >> v) & 1 == 1

    def weight(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self.weight_map[key]
        except KeyError:
            raise GraphError(f"no weighted edge ({u}, {v})") from None

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    @property
    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2


def _check_node(g: Graph, u: int) -> None:
    if not 0 <= u < g.n or u in g.removed:
        raise GraphError(f"node {u} out of range for {g.n} nodes")


def neighbors(g: Graph, u: int) -> list[int]:
    _check_node(g, u)
    return list(g.adjacency[u])


def isolated_nodes(g: Graph) -> list[int]:
    return [u for u in g.nodes if not g.adjacency[u]]


def remove_nodes(g: Graph, nodes: Iterable[int]) -> Graph:
    """Drop ``nodes`` and their incident edges; survivors keep their identifiers."""
    drop = set(nodes)
    for u in drop:
        _check_node(g, u)
    if not drop:
        return g
    keep = [i for i, (u, v) in enumerate(g.edges) if u not in drop and v not in drop]
    weights = None if g.weights is None else tuple(g.weights[i] for i in keep)
    return Graph(g.n, tuple(g.edges[i] for i in keep), weights, g.labels, g.removed | drop)


def complement(g: Graph) -> Graph:
    if g.weights is not None or g.labels is not None:
        raise GraphError("complement is defined for unweighted, unlabeled graphs only")
    present = g.edge_set
    live = g.nodes
    edges = tuple(
        (u, v) for i, u in enumerate(live) for v in live[i + 1:] if (u, v) not in present
    )
    return Graph(g.n, edges, removed=g.removed)


@dataclass(frozen=True)
class TaskInstance:
    kind: TaskKind
    g: Graph
    h: Graph | None = None
    query: tuple[int, int] | None = None
    size_class: SizeClass | None = None
    instance_id: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        kind = self.kind
        if self.g.removed or (self.h is not None and self.h.removed):
            raise GraphError("instance graphs cannot have removed nodes")
        if (self.h is not None) != (kind in TWO_GRAPH_TASKS):
            raise GraphError(f"{kind}: second graph must be present iff task is MCS/GED")
        if (self.query is not None) != (kind in QUERY_TASKS):
            raise GraphError(f"{kind}: query nodes must be present iff task is Neighbor/Distance")
        if self.query is not None:
            a, b = self.query
            if a == b:
                raise GraphError("query nodes must be distinct")
            _check_node(self.g, a)
            _check_node(self.g, b)
        if kind is TaskKind.TSP:
            if self.g.weights is None or not self.g.is_complete:
                raise GraphError("TSP instances need a complete weighted graph")
        elif self.g.weights is not None:
            raise GraphError(f"{kind}: unexpected edge weights")
        if kind is TaskKind.GED:
            assert self.h is not None
            if self.g.labels is None or self.h.labels is None:
                raise GraphError("GED instances need labeled nodes")
            if self.g.n != self.h.n:
                raise GraphError("GED graphs must have equal node counts")
        elif self.g.labels is not None or (self.h is not None and self.h.labels is not None):
            raise GraphError(f"{kind}: unexpected node labels")
        if self.size_class is not None:
            lo, hi = self.size_class.node_range(kind)
            if not lo <= self.g.n <= hi:
                raise GraphError(
                    f"{kind} {self.size_class}: {self.g.n} nodes outside [{lo}, {hi}]"
                )


# ---------------------------------------------------------------------------
# Instance text grammar


def fmt_list(items: Sequence[object]) -> str:
    return "[" + ", ".join(str(x) for x in items) + "]"


def _fmt_edges(g: Graph) -> str:
    if g.weights is not None:
        parts = [f"({u}, {v}, {w})" for (u, v), w in zip(g.edges, g.weights)]
    else:
        parts = [f"({u}, {v})" for u, v in g.edges]
    return "[" + ", ".join(parts) + "]"


def _fmt_labels(g: Graph) -> str:
    assert g.labels is not None
    return "[" + ", ".join(f"({i}, '{lab}')" for i, lab in enumerate(g.labels)) + "]"


def _one_graph(g: Graph) -> str:
    return (
        f"The graph has {g.n} nodes. The nodes are numbered from 0 to {g.n - 1}, "
        f"and the edges are: {_fmt_edges(g)}."
    )


def _named_graph(name: str, g: Graph) -> str:
    if g.labels is not None:
        nodes = f"the nodes are: {_fmt_labels(g)}"
    else:
        nodes = f"the nodes are numbered from 0 to {g.n - 1}"
    return f"The graph {name} has {g.n} nodes, {nodes}, and the edges are: {_fmt_edges(g)}."


def render_instance_text(inst: TaskInstance) -> str:
    if inst.h is not None:
        return _named_graph("G", inst.g) + " " + _named_graph("H", inst.h)
    text = _one_graph(inst.g)
    if inst.kind is TaskKind.NEIGHBOR:
        assert inst.query is not None
        text += f" The given nodes are {fmt_list(inst.query)}."
    elif inst.kind is TaskKind.DISTANCE:
        assert inst.query is not None
        s, t = inst.query
        text += f" The source node is {s}, and the target node is {t}."
    return text


class InstanceParseError(ValueError):
    def __init__(self, message: str, token: str | None = None):
        super().__init__(message if token is None else f"{message}: {token!r}")
        self.token = token


_INT = r"-?\d+"
_LIST = r"\[([^\[\]]*)\]"
_ONE_RE = re.compile(
    rf"The graph has ({_INT}) nodes\. The nodes are numbered from 0 to ({_INT}), "
    rf"and the edges are: {_LIST}\.(.*)",
    re.S,
)
_NAMED_NUMBERED = (
    rf"The graph {{name}} has ({_INT}) nodes, the nodes are numbered from 0 to ({_INT}), "
    rf"and the edges are: {_LIST}\."
)
_NAMED_LABELED = rf"The graph {{name}} has ({_INT}) nodes, the nodes are: {_LIST}, and the edges are: {_LIST}\."
_MCS_RE = re.compile(
    _NAMED_NUMBERED.format(name="G") + r"\s*" + _NAMED_NUMBERED.format(name="H") + r"(.*)",
    re.S,
)
_GED_RE = re.compile(
    _NAMED_LABELED.format(name="G") + r"\s*" + _NAMED_LABELED.format(name="H") + r"(.*)",
    re.S,
)
_NEIGHBOR_SUFFIX = re.compile(rf"The given nodes are {_LIST}\.")
_DISTANCE_SUFFIX = re.compile(rf"The source node is ({_INT}), and the target node is ({_INT})\.")
_EDGE_TOKEN = re.compile(rf"\(\s*({_INT})\s*,\s*({_INT})\s*(?:,\s*({_INT})\s*)?\)")
_LABEL_TOKEN = re.compile(rf"\(\s*({_INT})\s*,\s*'([^']*)'\s*\)")


def _split_items(body: str, token_re: re.Pattern[str]) -> list[re.Match[str]]:
    """Match a comma separated item list, reporting the first bad token."""
    items: list[re.Match[str]] = []
    pos = 0
    body = body.strip()
    while pos < len(body):
        m = token_re.match(body, pos)
        if m is None:
            bad = body[pos:].split("),")[0].strip()
            raise InstanceParseError("malformed list item", bad)
        items.append(m)
        pos = m.end()
        sep = re.compile(r"\s*,\s*").match(body, pos)
        if sep is None:
            if pos < len(body):
                raise InstanceParseError("malformed list item", body[pos:].strip())
            break
        pos = sep.end()
        if pos >= len(body):
            raise InstanceParseError("trailing comma in list", body[-8:])
    return items


def _parse_int(tok: str) -> int:
    return int(tok)


def _parse_edges(body: str, n: int, weighted: bool) -> tuple[tuple[tuple[int, int], ...], tuple[int, ...] | None]:
    edges: list[tuple[int, int]] = []
    weights: list[int] = []
    seen: set[tuple[int, int]] = set()
    for m in _split_items(body, _EDGE_TOKEN):
        u, v = _parse_int(m.group(1)), _parse_int(m.group(2))
        has_w = m.group(3) is not None
        if has_w != weighted:
            raise InstanceParseError(
                "expected weighted triple" if weighted else "unexpected weight", m.group(0)
            )
        if u == v:
            raise InstanceParseError("self-loop", m.group(0))
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceParseError("node out of range", m.group(0))
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InstanceParseError("duplicate edge", m.group(0))
        seen.add(key)
        edges.append(key)
        if weighted:
            w = _parse_int(m.group(3))
            if w <= 0:
                raise InstanceParseError("non-positive weight", m.group(0))
            weights.append(w)
    return tuple(edges), (tuple(weights) if weighted else None)


def _parse_labels(body: str, n: int) -> tuple[str, ...]:
    labels: list[str | None] = [None] * n
    for m in _split_items(body, _LABEL_TOKEN):
        i = _parse_int(m.group(1))
        if not 0 <= i < n:
            raise InstanceParseError("node out of range", m.group(0))
        if labels[i] is not None:
            raise InstanceParseError("node labeled twice", m.group(0))
        labels[i] = m.group(2)
    missing = [i for i, lab in enumerate(labels) if lab is None]
    if missing:
        raise InstanceParseError("unlabeled node", str(missing[0]))
    return tuple(lab for lab in labels if lab is not None)


def _node_count(count: str, last: str | None) -> int:
    n = _parse_int(count)
    if n < 0:
        raise InstanceParseError("negative node count", count)
    if last is not None and _parse_int(last) != n - 1:
        raise InstanceParseError("node numbering does not match node count", last)
    return n


def _graph(n: int, edges_body: str, weighted: bool = False, labels_body: str | None = None) -> Graph:
    edges, weights = _parse_edges(edges_body, n, weighted)
    labels = None if labels_body is None else _parse_labels(labels_body, n)
    return Graph(n, edges, weights, labels)


def _expect_empty(rest: str) -> None:
    if rest.strip():
        raise InstanceParseError("unexpected trailing text", rest.strip().split()[0])


def parse_instance_text(text: str, kind: TaskKind, instance_id: str = "") -> TaskInstance:
    """Parse the instance text grammar back into a :class:`TaskInstance`.

    Whitespace runs are collapsed and edges may appear in any order; the
    result re-renders to the canonical form.
    """
    text = " ".join(text.split())
    h: Graph | None = None
    query: tuple[int, int] | None = None
    if kind is TaskKind.MCS:
        m = _MCS_RE.fullmatch(text)
        if m is None:
            raise InstanceParseError("not a two-graph MCS instance", text[:40])
        g = _graph(_node_count(m.group(1), m.group(2)), m.group(3))
        h = _graph(_node_count(m.group(4), m.group(5)), m.group(6))
        _expect_empty(m.group(7))
    elif kind is TaskKind.GED:
        m = _GED_RE.fullmatch(text)
        if m is None:
            raise InstanceParseError("not a labeled two-graph GED instance", text[:40])
        g = _graph(_node_count(m.group(1), None), m.group(3), labels_body=m.group(2))
        h = _graph(_node_count(m.group(4), None), m.group(6), labels_body=m.group(5))
        _expect_empty(m.group(7))
    else:
        m = _ONE_RE.fullmatch(text)
        if m is None:
            raise InstanceParseError("not a single-graph instance", text[:40])
        n = _node_count(m.group(1), m.group(2))
        g = _graph(n, m.group(3), weighted=kind is TaskKind.TSP)
        rest = m.group(4).strip()
        if kind is TaskKind.NEIGHBOR:
            sm = _NEIGHBOR_SUFFIX.fullmatch(rest)
            if sm is None:
                raise InstanceParseError("missing query nodes", rest[:40] or "<end>")
            parts = [p.strip() for p in sm.group(1).split(",") if p.strip()]
            if len(parts) != 2 or not all(re.fullmatch(_INT, p) for p in parts):
                raise InstanceParseError("expected two query nodes", sm.group(0))
            query = (_parse_int(parts[0]), _parse_int(parts[1]))
        elif kind is TaskKind.DISTANCE:
            sm = _DISTANCE_SUFFIX.fullmatch(rest)
            if sm is None:
                raise InstanceParseError("missing query nodes", rest[:40] or "<end>")
            query = (_parse_int(sm.group(1)), _parse_int(sm.group(2)))
        else:
            _expect_empty(rest)
        if query is not None:
            for q in query:
                if not 0 <= q < n:
                    raise InstanceParseError("query node out of range", str(q))
            if query[0] == query[1]:
                raise InstanceParseError("query nodes must differ", str(query[1]))
    try:
        return TaskInstance(kind, g, h, query, size_class_for(kind, g.n), instance_id)
    except GraphError as exc:
        raise InstanceParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Synthetic sampling

EDGE_PROB_RANGE = (0.15, 0.5)
WEIGHT_RANGE = (1, 9999)
LABEL_ALPHABET = ("C", "N", "O", "S", "Si", "Na", "Mg", "Cl", "P", "F")
SAMPLER_VERSION = "er-1"


def _er_edges(rng: random.Random, n: int, p: float) -> tuple[tuple[int, int], ...]:
    return tuple((u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p)


def _connected(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps <= 1


def _er_graph(rng: random.Random, n: int, connected: bool = False) -> Graph:
    while True:
        p = rng.uniform(*EDGE_PROB_RANGE)
        edges = _er_edges(rng, n, p)
        if not connected or _connected(n, edges):
            return Graph(n, edges)


def sample_instance(
    kind: TaskKind,
    size_class: SizeClass,
    seed: int,
    *,
    max_nodes: int | None = None,
    instance_id: str | None = None,
) -> TaskInstance:
    """Draw a random instance; the same ``(kind, size_class, seed)`` gives the same instance.

    ``max_nodes`` clips the upper end of the size range (used to stay within
    brute-force limits in tests).
    """
    rng = random.Random(f"{kind.value}|{size_class.value}|{seed}")
    lo, hi = size_class.node_range(kind)
    if max_nodes is not None:
        hi = min(hi, max_nodes)
        if hi < lo:
            raise ValueError(f"max_nodes={max_nodes} below the {size_class} range for {kind}")
    n = rng.randint(lo, hi)
    if instance_id is None:
        instance_id = f"{kind.value.lower()}-{size_class.value.lower()}-{seed}"
    h = None
    query = None
    if kind is TaskKind.TSP:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        g = Graph(n, tuple(pairs), tuple(rng.randint(*WEIGHT_RANGE) for _ in pairs))
    elif kind is TaskKind.GED:
        g0 = _er_graph(rng, n)
        h0 = _er_graph(rng, n)
        g = Graph(n, g0.edges, labels=tuple(rng.choice(LABEL_ALPHABET) for _ in range(n)))
        h = Graph(n, h0.edges, labels=tuple(rng.choice(LABEL_ALPHABET) for _ in range(n)))
    elif kind is TaskKind.MCS:
        g = _er_graph(rng, n)
        h = _er_graph(rng, rng.randint(lo, hi))
    else:
        g = _er_graph(rng, n, connected=kind is TaskKind.DIAMETER)
        if kind in QUERY_TASKS:
            a, b = rng.sample(range(n), 2)
            query = (a, b)
    return TaskInstance(kind, g, h, query, size_class, instance_id)
