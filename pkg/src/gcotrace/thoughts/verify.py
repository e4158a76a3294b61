"""Replay a trace against its instance.

Every line is parsed with the task's templates and checked against a state
machine that tracks what the narrated procedure must look like at that point:
queue contents, remaining nodes and edges, running costs, partial solutions.
Choices the narration is free to make (which optimal node to add next, which
node starts a component) are accepted as long as they are legal; everything
the narration claims about the instance is recomputed.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any

from ..graph import TaskInstance, TaskKind
from ..solvers.base import Solution
from ..solvers.exact import bfs_distances
from .generators import ged_step, mcs_link_template
from .templates import final_template, match_line, task_templates
from .trace import ThoughtTrace


@dataclass(frozen=True)
class ReplayReport:
    consistent: bool
    line_number: int | None = None  # 1-based; None when the whole trace replays
    line: str | None = None
    reason: str = ""
    solution: Solution | None = None
    valid: bool = False

    @property
    def ok(self) -> bool:
        return self.consistent and self.valid

    def describe(self) -> str:
        if self.ok:
            return "consistent; final solution valid"
        if self.consistent:
            return f"consistent; final solution invalid: {self.reason}"
        where = "end of trace" if self.line is None else f"line {self.line_number}: {self.line!r}"
        return f"diverges at {where}: {self.reason}"


class _Diverge(Exception):
    pass


def _need(cond: bool, reason: str) -> None:
    if not cond:
        raise _Diverge(reason)


class _Replay:
    kind: TaskKind

    def __init__(self, inst: TaskInstance):
        self.inst = inst
        self.g = inst.g
        self.done = False
        self.solution: Solution | None = None
        self.expect: set[str] = set()

    def feed(self, tid: str, values: dict[str, Any]) -> None:
        getattr(self, "on_" + tid.rsplit(".", 1)[-1])(**values)

    def close(self, nodes, h_nodes=None) -> None:
        self.solution = Solution(self.kind, tuple(nodes), None if h_nodes is None else tuple(h_nodes))
        self.done = True
        self.expect = set()

    def on_finished(self) -> None:
        self.expect = {final_template(self.kind).id}


class _Neighbor(_Replay):
    kind = TaskKind.NEIGHBOR

    def __init__(self, inst):
        super().__init__(inst)
        self.queried = list(inst.query or ())
        self.expect = {"neighbor.adjacent"}

    def on_adjacent(self, v, nodes):
        _need(v == self.queried[0], f"expected the neighbors of node {self.queried[0]}")
        _need(nodes == list(self.g.adjacency[v]), f"neighbors of node {v} are {list(self.g.adjacency[v])}")
        self.queried.pop(0)
        self.expect = {"neighbor.adjacent"} if self.queried else {"neighbor.final"}

    def on_final(self, nodes):
        a, b = self.inst.query  # type: ignore[misc]
        common = sorted(set(self.g.adjacency[a]) & set(self.g.adjacency[b]))
        _need(nodes == common, f"common neighbors are {common}")
        self.close(nodes)


class _Distance(_Replay):
    kind = TaskKind.DISTANCE

    def __init__(self, inst):
        super().__init__(inst)
        self.s, self.t = inst.query
        self.queue = deque([[self.s]])
        self.seen = {self.s}
        self.hit: list[int] | None = None
        self.expect = {"distance.expand"}

    def on_expand(self, path, v, nodes):
        _need(bool(self.queue) and path == self.queue[0], f"next path in the queue is {self.queue[0] if self.queue else None}")
        _need(v == path[-1], "expanded node must end the current path")
        self.queue.popleft()
        _need(nodes == list(self.g.adjacency[v]), f"neighbors of node {v} are {list(self.g.adjacency[v])}")
        if self.t in nodes:
            self.hit = path
            self.expect = {"distance.found"}
            return
        for x in nodes:
            if x not in self.seen:
                self.seen.add(x)
                self.queue.append(path + [x])
        self.expect = {"distance.expand"} if self.queue else {"distance.final"}

    def on_found(self, t):
        _need(t == self.t, f"target node is {self.t}")
        self.expect = {"distance.final"}

    def on_final(self, path):
        want = [] if self.hit is None else self.hit + [self.t]
        _need(path == want, f"path found by the search is {want}")
        self.close(path)


class _Connected(_Replay):
    kind = TaskKind.CONNECTED

    def __init__(self, inst):
        super().__init__(inst)
        self.seen: set[int] = set()
        self.queue: deque[int] = deque()
        self.comp: list[int] = []
        self.reps: list[int] = []
        self.start = -1
        self.last = -1
        self.expect = {"connected.start"} if self.g.n else {"connected.final"}

    def on_start(self, u):
        _need(u < self.g.n and u not in self.seen, f"node {u} is not an unvisited node")
        self.seen.add(u)
        self.queue = deque([u])
        self.comp = []
        self.start = u
        self.expect = {"connected.visit"}

    def on_visit(self, v):
        _need(v == self.queue[0], f"next node in the queue is {self.queue[0]}")
        self.queue.popleft()
        self.comp.append(v)
        self.last = v
        self.expect = {"connected.enqueue"}

    def on_enqueue(self, v, nodes):
        _need(v == self.last, f"last visited node is {self.last}")
        fresh = [x for x in self.g.adjacency[v] if x not in self.seen]
        _need(nodes == fresh, f"unvisited neighbors of node {v} are {fresh}")
        self.seen.update(fresh)
        self.queue.extend(fresh)
        self.expect = {"connected.current", "connected.visit" if self.queue else "finished"}

    def on_current(self, nodes):
        _need(nodes == self.comp, f"component so far is {self.comp}")
        self.expect = {"connected.visit" if self.queue else "finished"}

    def on_finished(self):
        self.expect = {"connected.component"}

    def on_component(self, k, nodes, r):
        _need(k == len(self.reps) + 1, f"this is component {len(self.reps) + 1}")
        _need(nodes == self.comp, f"component nodes are {self.comp}")
        _need(r == self.start, f"representative is the start node {self.start}")
        self.reps.append(r)
        self.expect = {"connected.start"} if len(self.seen) < self.g.n else {"connected.final"}

    def on_final(self, nodes):
        _need(nodes == self.reps, f"representatives found are {self.reps}")
        self.close(nodes)


class _Diameter(_Replay):
    kind = TaskKind.DIAMETER

    def __init__(self, inst):
        super().__init__(inst)
        self.expect = {"diameter.source"}
        self.s = -1
        self.dist: dict[int, int] = {}
        self.queue: deque[int] = deque()
        self.fresh: list[int] = []
        self.v = -1
        self.t = -1
        self.d = -1

    def _silent(self, x: int) -> None:
        fresh = [y for y in self.g.adjacency[x] if y not in self.dist]
        _need(not fresh, f"expanding node {x} reaches {fresh}, which the trace skips")

    def on_source(self, s):
        _need(s < self.g.n, f"node {s} out of range")
        rows = [bfs_distances(self.g, u) for u in range(self.g.n)]
        _need(all(x >= 0 for row in rows for x in row), "graph is disconnected")
        diameter = max(max(row) for row in rows)
        _need(max(rows[s]) == diameter, f"node {s} is not an endpoint of a diameter path")
        self.s = s
        self.expect = {"diameter.start"}

    def on_start(self, s):
        _need(s == self.s, f"source node is {self.s}")
        self.dist = {s: 0}
        self.queue = deque([s])
        self.expect = {"diameter.adjacent", "diameter.farthest"}

    def on_adjacent(self, v, nodes):
        while self.queue and self.queue[0] != v:
            self._silent(self.queue.popleft())
        _need(bool(self.queue), f"node {v} is not waiting in the search queue")
        self.queue.popleft()
        _need(nodes == list(self.g.adjacency[v]), f"neighbors of node {v} are {list(self.g.adjacency[v])}")
        self.v = v
        self.fresh = [y for y in nodes if y not in self.dist]
        self.expect = {"diameter.update"}

    def on_update(self, nodes, d):
        _need(nodes == self.fresh, f"newly reached nodes are {self.fresh}")
        want = self.dist[self.v] + 1
        _need(d == want, f"their distance is {want}")
        for y in nodes:
            self.dist[y] = d
        self.queue.extend(nodes)
        self.expect = {"diameter.adjacent", "diameter.farthest"}

    def on_farthest(self, s, t, d):
        while self.queue:
            self._silent(self.queue.popleft())
        _need(s == self.s, f"source node is {self.s}")
        _need(t in self.dist and self.dist[t] == d, f"node {t} is at distance {self.dist.get(t)}")
        far = max(self.dist.values())
        _need(d == far, f"farthest distance is {far}")
        self.t, self.d = t, d
        self.expect = {"diameter.final"}

    def on_final(self, path):
        ok = (
            len(path) == self.d + 1
            and path[0] == self.s
            and path[-1] == self.t
            and all(self.g.has_edge(a, b) for a, b in zip(path, path[1:]))
        )
        _need(ok, f"not a path of length {self.d} from {self.s} to {self.t}")
        self.close(path)


class _MVC(_Replay):
    kind = TaskKind.MVC

    def __init__(self, inst):
        super().__init__(inst)
        self.live = set(range(self.g.n))
        self.edges = set(self.g.edges)
        self.deg = [self.g.degree(u) for u in range(self.g.n)]
        self.cover: list[int] = []
        self.last = -1
        self.expect = {"mvc.isolated"}

    def on_isolated(self, nodes):
        want = sorted(u for u in self.live if self.deg[u] == 0)
        _need(nodes == want, f"isolated nodes are {want}")
        self.live.difference_update(nodes)
        self.expect = {"mvc.add"} if self.edges else {"mvc.empty"}

    def on_add(self, u):
        _need(u in self.live and self.deg[u] > 0, f"node {u} has no uncovered edge")
        self.cover.append(u)
        self.last = u
        self.expect = {"mvc.current"}

    def on_current(self, nodes):
        _need(nodes == self.cover, f"cover so far is {self.cover}")
        self.expect = {"mvc.edges"}

    def on_edges(self, u, edges):
        _need(u == self.last, f"last added node is {self.last}")
        want = sorted(e for e in self.edges if u in e)
        _need(edges == want, f"remaining edges of node {u} are {want}")
        for a, b in want:
            self.deg[a] -= 1
            self.deg[b] -= 1
        self.edges.difference_update(want)
        self.expect = {"mvc.isolated"}

    def on_empty(self):
        self.expect = {"finished"}

    def on_final(self, nodes):
        _need(nodes == self.cover, f"cover built is {self.cover}")
        self.close(nodes)


class _MIS(_Replay):
    kind = TaskKind.MIS

    def __init__(self, inst):
        super().__init__(inst)
        self.live = set(range(self.g.n))
        self.chosen: list[int] = []
        self.last: int | None = None
        self.expect = {"mis.isolated"} if self.g.n else {"finished"}

    def _residual(self, u: int) -> list[int]:
        return [x for x in self.g.adjacency[u] if x in self.live]

    def on_isolated(self, nodes):
        want = sorted(u for u in self.live if not self._residual(u))
        _need(nodes == want, f"isolated nodes are {want}")
        self.live.difference_update(nodes)
        self.chosen.extend(nodes)
        self.last = None
        self.expect = {"mis.add"} if self.live else {"mis.current"}

    def on_add(self, u):
        _need(u in self.live, f"node {u} is no longer in the graph")
        self.chosen.append(u)
        self.last = u
        self.expect = {"mis.current"}

    def on_current(self, nodes):
        _need(nodes == self.chosen, f"set so far is {self.chosen}")
        self.expect = {"mis.remaining"} if self.last is None else {"mis.remove"}

    def on_remove(self, u, nodes):
        _need(u == self.last, f"last added node is {self.last}")
        want = self._residual(u)
        _need(nodes == want, f"remaining neighbors of node {u} are {want}")
        self.live.discard(u)
        self.live.difference_update(want)
        self.last = None
        self.expect = {"mis.remaining"}

    def on_remaining(self, nodes):
        want = sorted(self.live)
        _need(nodes == want, f"remaining nodes are {want}")
        self.expect = {"mis.isolated"} if self.live else {"finished"}

    def on_final(self, nodes):
        _need(nodes == self.chosen, f"set built is {self.chosen}")
        self.close(nodes)


class _MCP(_Replay):
    kind = TaskKind.MCP

    def __init__(self, inst):
        super().__init__(inst)
        self.cand = set(range(self.g.n))
        self.clique: list[int] = []
        self.expect = {"mcp.add"} if self.g.n else {"finished"}

    def on_add(self, u):
        _need(u in self.cand, f"node {u} is not adjacent to every clique node")
        self.clique.append(u)
        self.cand.intersection_update(self.g.adjacency[u])
        self.expect = {"mcp.current"}

    def on_current(self, nodes):
        _need(nodes == self.clique, f"clique so far is {self.clique}")
        self.expect = {"mcp.common"} if self.cand else {"finished"}

    def on_common(self, nodes):
        want = sorted(self.cand)
        _need(nodes == want, f"common neighbors are {want}")
        self.expect = {"mcp.add"}

    def on_final(self, nodes):
        _need(nodes == self.clique, f"clique built is {self.clique}")
        self.close(nodes)


class _TSP(_Replay):
    kind = TaskKind.TSP

    def __init__(self, inst):
        super().__init__(inst)
        self.tour: list[int] = []
        self.expect = {"tsp.start"}

    def on_start(self, u):
        _need(u < self.g.n, f"node {u} out of range")
        self.tour = [u]
        self.expect = {"tsp.hop"}

    def on_hop(self, v, u, w):
        _need(u == self.tour[-1], f"tour currently ends at node {self.tour[-1]}")
        if len(self.tour) == self.g.n:
            _need(v == self.tour[0], f"the tour must return to node {self.tour[0]}")
        else:
            _need(v < self.g.n and v not in self.tour, f"node {v} cannot be visited next")
        weight = self.g.weight(u, v)
        _need(w == weight, f"edge ({u}, {v}) has weight {weight}")
        self.tour.append(v)
        self.expect = {"tsp.current"}

    def on_current(self, path):
        _need(path == self.tour, f"subtour is {self.tour}")
        self.expect = {"finished"} if len(self.tour) == self.g.n + 1 else {"tsp.hop"}

    def on_final(self, path):
        _need(path == self.tour, f"tour built is {self.tour}")
        self.close(path)


class _MCS(_Replay):
    kind = TaskKind.MCS
    _LINKS = ("none", "all", "some")

    def __init__(self, inst):
        super().__init__(inst)
        self.h = inst.h
        self.gl: list[int] = []
        self.hl: list[int] = []
        self.pending: tuple[int, int] = (-1, -1)
        self.idx: list[int] = []
        self.expect = {"mcs.first"}

    def feed(self, tid, values):
        side, _, form = tid.rpartition(".")[2].partition("_")
        if form in self._LINKS:
            self.on_link(side, tid, **values)
        else:
            super().feed(tid, values)

    def _link_ids(self, side: str) -> set[str]:
        return {f"mcs.{side}_{form}" for form in self._LINKS}

    def on_first(self, u, v):
        _need(u < self.g.n and v < self.h.n, "node out of range")
        self.gl.append(u)
        self.hl.append(v)
        self.expect = {"mcs.current"}

    def on_current(self, g_nodes, h_nodes):
        _need(g_nodes == self.gl and h_nodes == self.hl, f"lists so far are {self.gl}, {self.hl}")
        self.expect = self._link_ids("g") | {"finished"}

    def on_link(self, side, tid, u, nodes=None, idx=None, others=None, other_idx=None):
        graph, listed = (self.g, self.gl) if side == "g" else (self.h, self.hl)
        _need(u < graph.n and u not in listed, f"node {u} cannot join sub_{side}_nodes")
        nbrs = set(graph.adjacency[u])
        want = [i for i, x in enumerate(listed) if x in nbrs]
        form = mcs_link_template(side, want, len(listed))
        _need(tid == form, f"node {u} connects list indices {want}")
        if form.endswith("all"):
            _need(nodes == sorted(listed), f"listed nodes are {sorted(listed)}")
        elif form.endswith("some"):
            rest = [i for i in range(len(listed)) if i not in want]
            _need(idx == want and nodes == [listed[i] for i in want], f"connected indices are {want}")
            _need(other_idx == rest and others == [listed[i] for i in rest], f"unconnected indices are {rest}")
        if side == "g":
            self.pending = (u, -1)
            self.idx = want
            self.expect = self._link_ids("h")
        else:
            _need(want == self.idx, f"indices {want} in H differ from {self.idx} in G")
            self.pending = (self.pending[0], u)
            self.expect = {"mcs.choose"}

    def on_choose(self, u, v):
        _need((u, v) == self.pending, f"justified pair is {self.pending}")
        self.gl.append(u)
        self.hl.append(v)
        self.expect = {"mcs.current"}

    def on_final(self, g_nodes, h_nodes):
        _need(g_nodes == self.gl and h_nodes == self.hl, f"lists built are {self.gl}, {self.hl}")
        self.close(g_nodes, h_nodes)


class _GED(_Replay):
    kind = TaskKind.GED

    def __init__(self, inst):
        super().__init__(inst)
        self.h = inst.h
        self.mapping: list[int] = []
        self.cost = 0
        self.pair = (-1, -1)
        self.inserted: list[int] = []
        self.deleted: list[int] = []
        self.expect = {"ged.map"} if self.g.n else {"finished"}

    def _after_edges(self) -> set[str]:
        if self.inserted:
            return {"ged.insert"}
        if self.deleted:
            return {"ged.delete"}
        return {"ged.current"}

    def on_map(self, i, lg, j, lh):
        _need(i == len(self.mapping), f"next node of G is {len(self.mapping)}")
        _need(j < self.h.n and j not in self.mapping, f"node {j} of H is not free")
        _need(lg == self.g.labels[i], f"node {i} of G is labeled {self.g.labels[i]}")
        _need(lh == self.h.labels[j], f"node {j} of H is labeled {self.h.labels[j]}")
        self.pair = (i, j)
        self.inserted, self.deleted = ged_step(self.g, self.h, self.mapping, i, j)
        self.expect = {"ged.same", "ged.diff"}

    def _label(self, i, j, same):
        _need((i, j) == self.pair, f"current pair is {self.pair[0]}~{self.pair[1]}")
        really = self.g.labels[i] == self.h.labels[j]
        _need(same == really, "label comparison is wrong")
        self.cost += 0 if same else 1
        self.expect = self._after_edges()

    def on_same(self, i, j):
        self._label(i, j, True)

    def on_diff(self, i, j):
        self._label(i, j, False)

    def _edge_line(self, nodes, i, j, c, want):
        _need((i, j) == self.pair, f"current pair is {self.pair[0]}~{self.pair[1]}")
        _need(nodes == want, f"affected earlier nodes are {want}")
        _need(c == len(want), f"cost is {len(want)}")
        self.cost += c

    def on_insert(self, nodes, i, j, c):
        self._edge_line(nodes, i, j, c, self.inserted)
        self.inserted = []
        self.expect = self._after_edges()

    def on_delete(self, nodes, i, j, c):
        self._edge_line(nodes, i, j, c, self.deleted)
        self.deleted = []
        self.expect = {"ged.current"}

    def on_current(self, nodes, c):
        want = self.mapping + [self.pair[1]]
        _need(nodes == want, f"mapping so far is {want}")
        _need(c == self.cost, f"running cost is {self.cost}")
        self.mapping = want
        self.expect = {"ged.map"} if len(self.mapping) < self.g.n else {"finished"}

    def on_final(self, nodes):
        _need(nodes == self.mapping, f"mapping built is {self.mapping}")
        self.close(nodes)


_REPLAYS: dict[TaskKind, type[_Replay]] = {
    cls.kind: cls for cls in (_Neighbor, _Distance, _Connected, _Diameter, _MVC, _MIS, _MCP, _TSP, _MCS, _GED)
}


def verify_trace(inst: TaskInstance, trace: ThoughtTrace | str) -> ReplayReport:
    """Replay ``trace`` (a trace object or its rendered text) on ``inst``."""
    from ..eval.scoring import validate_solution

    if isinstance(trace, ThoughtTrace):
        lines = trace.text_lines
    else:
        lines = trace.splitlines()
        while lines and not lines[-1].strip():
            lines.pop()
    replay = _REPLAYS[inst.kind](inst)
    all_ids = [t.id for t in task_templates(inst.kind)]
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if replay.done:
            return ReplayReport(False, number, raw, "text after the final solution")
        hit = match_line(inst.kind, line, sorted(replay.expect))
        if hit is None:
            other = match_line(inst.kind, line, all_ids)
            if other is None:
                reason = "line matches no template"
            else:
                reason = f"{other[0].id} line is out of place; expected one of {sorted(replay.expect)}"
            return ReplayReport(False, number, raw, reason)
        try:
            replay.feed(hit[0].id, hit[1])
        except _Diverge as exc:
            return ReplayReport(False, number, raw, str(exc))
    if not replay.done or replay.solution is None:
        return ReplayReport(False, None, None, "trace ends before its final solution")
    valid, reason = validate_solution(inst, replay.solution)
    return ReplayReport(True, None, None, reason, replay.solution, valid)
