"""Trace generators.

Forward generators (Neighbor, Distance, Connected, Diameter) run a textbook
procedure and narrate it.  Backward generators (MVC, MIS, MCP, TSP, MCS,
GED) take an optimal solution, by default from the exact solvers, and narrate
building it up one element at a time, describing the shrinking instance as
they go.

Where the narration leaves a choice open the generators resolve it the same
way every time: lowest unvisited node to start a component, ascending queue
insertion, and for the set tasks the remaining optimal node of highest
residual degree (lowest id on ties).
"""
from __future__ import annotations

from collections import deque
from typing import Callable

from ..graph import TaskInstance, TaskKind
from ..solvers.base import Solution
from ..solvers.exact import solve
from .trace import LineWriter, ThoughtTrace

SNAPSHOT_EVERY = 3


class TraceError(ValueError):
    """The supplied solution cannot be narrated on this instance."""


def _optimum(inst: TaskInstance, solution: Solution | None) -> Solution:
    if solution is None:
        solution = solve(inst)
        if solution is None:
            raise TraceError(f"{inst.kind} instance has no solution")
    if solution.kind is not inst.kind:
        raise TraceError(f"expected a {inst.kind} solution, got {solution.kind}")
    return solution


def trace_neighbor(inst: TaskInstance) -> ThoughtTrace:
    assert inst.kind is TaskKind.NEIGHBOR and inst.query is not None
    g = inst.g
    a, b = inst.query
    w = LineWriter(inst.kind)
    w.emit("neighbor.adjacent", v=a, nodes=g.adjacency[a])
    w.emit("neighbor.adjacent", v=b, nodes=g.adjacency[b])
    common = sorted(set(g.adjacency[a]) & set(g.adjacency[b]))
    w.emit("neighbor.final", nodes=common)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(common)))


def trace_distance(inst: TaskInstance) -> ThoughtTrace:
    assert inst.kind is TaskKind.DISTANCE and inst.query is not None
    g = inst.g
    s, t = inst.query
    w = LineWriter(inst.kind)
    found: list[int] = []
    queue = deque([[s]])
    seen = {s}
    while queue:
        path = queue.popleft()
        v = path[-1]
        nbrs = g.adjacency[v]
        w.emit("distance.expand", path=path, v=v, nodes=nbrs)
        if t in nbrs:
            w.emit("distance.found", t=t)
            found = path + [t]
            break
        for x in nbrs:
            if x not in seen:
                seen.add(x)
                queue.append(path + [x])
    w.emit("distance.final", path=found)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(found)))


def trace_connected(inst: TaskInstance) -> ThoughtTrace:
    assert inst.kind is TaskKind.CONNECTED
    g = inst.g
    w = LineWriter(inst.kind)
    seen: set[int] = set()
    reps: list[int] = []
    for start in range(g.n):
        if start in seen:
            continue
        w.emit("connected.start", u=start)
        seen.add(start)
        queue = deque([start])
        comp: list[int] = []
        while queue:
            v = queue.popleft()
            w.emit("connected.visit", v=v)
            comp.append(v)
            fresh = [x for x in g.adjacency[v] if x not in seen]
            seen.update(fresh)
            queue.extend(fresh)
            w.emit("connected.enqueue", v=v, nodes=fresh)
            if queue and len(comp) % SNAPSHOT_EVERY == 0:
                w.emit("connected.current", nodes=comp)
        w.emit("finished")
        reps.append(start)
        w.emit("connected.component", k=len(reps), nodes=comp, r=start)
    w.emit("connected.final", nodes=reps)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(reps)))


def trace_diameter(inst: TaskInstance, solution: Solution | None = None) -> ThoughtTrace:
    """Narrate one BFS from an endpoint of a diameter path.

    The endpoint comes from the solver; BFS expansions that discover nothing
    new are left out of the text.
    """
    assert inst.kind is TaskKind.DIAMETER
    g = inst.g
    path = list(_optimum(inst, solution).nodes)
    s = path[0]
    w = LineWriter(inst.kind)
    w.emit("diameter.source", s=s)
    w.emit("diameter.start", s=s)
    dist = {s: 0}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        fresh = [x for x in g.adjacency[v] if x not in dist]
        if not fresh:
            continue
        for x in fresh:
            dist[x] = dist[v] + 1
        queue.extend(fresh)
        w.emit("diameter.adjacent", v=v, nodes=g.adjacency[v])
        w.emit("diameter.update", nodes=fresh, d=dist[v] + 1)
    if len(dist) != g.n:
        raise TraceError("diameter is undefined on a disconnected graph")
    t, d = path[-1], len(path) - 1
    if dist.get(t) != d or d != max(dist.values()):
        raise TraceError("supplied path is not a diameter path")
    w.emit("diameter.farthest", s=s, t=t, d=d)
    w.emit("diameter.final", path=path)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(path)))


def _pick(pool: set[int], degree: Callable[[int], int]) -> int:
    return min(pool, key=lambda u: (-degree(u), u))


def trace_mvc(inst: TaskInstance, solution: Solution | None = None) -> ThoughtTrace:
    assert inst.kind is TaskKind.MVC
    g = inst.g
    pending = set(_optimum(inst, solution).nodes)
    w = LineWriter(inst.kind)
    live = set(range(g.n))
    edges = set(g.edges)
    deg = [g.degree(u) for u in range(g.n)]
    cover: list[int] = []
    while True:
        isolated = sorted(u for u in live if deg[u] == 0)
        live.difference_update(isolated)
        w.emit("mvc.isolated", nodes=isolated)
        if not edges:
            break
        pool = {u for u in pending if deg[u] > 0}
        if not pool:
            raise TraceError("supplied nodes do not cover every edge")
        u = _pick(pool, deg.__getitem__)
        pending.discard(u)
        cover.append(u)
        w.emit("mvc.add", u=u)
        w.emit("mvc.current", nodes=cover)
        gone = sorted(e for e in edges if u in e)
        for a, b in gone:
            deg[a] -= 1
            deg[b] -= 1
        edges.difference_update(gone)
        w.emit("mvc.edges", u=u, edges=gone)
    w.emit("mvc.empty")
    w.emit("finished")
    w.emit("mvc.final", nodes=cover)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(cover)))


def trace_mis(inst: TaskInstance, solution: Solution | None = None) -> ThoughtTrace:
    assert inst.kind is TaskKind.MIS
    g = inst.g
    pending = set(_optimum(inst, solution).nodes)
    w = LineWriter(inst.kind)
    live = set(range(g.n))
    chosen: list[int] = []

    def residual(u: int) -> int:
        return sum(1 for x in g.adjacency[u] if x in live)

    while live:
        isolated = sorted(u for u in live if residual(u) == 0)
        live.difference_update(isolated)
        chosen.extend(isolated)
        pending.difference_update(isolated)
        w.emit("mis.isolated", nodes=isolated)
        if not live:
            w.emit("mis.current", nodes=chosen)
            w.emit("mis.remaining", nodes=[])
            break
        pool = pending & live
        if not pool:
            raise TraceError("supplied set is not a maximum independent set")
        u = _pick(pool, residual)
        pending.discard(u)
        chosen.append(u)
        w.emit("mis.add", u=u)
        w.emit("mis.current", nodes=chosen)
        dropped = [x for x in g.adjacency[u] if x in live]
        live.discard(u)
        live.difference_update(dropped)
        w.emit("mis.remove", u=u, nodes=dropped)
        w.emit("mis.remaining", nodes=sorted(live))
    if pending:
        raise TraceError("supplied set is not independent")
    w.emit("finished")
    w.emit("mis.final", nodes=chosen)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(chosen)))


def trace_mcp(inst: TaskInstance, solution: Solution | None = None) -> ThoughtTrace:
    assert inst.kind is TaskKind.MCP
    g = inst.g
    pending = set(_optimum(inst, solution).nodes)
    w = LineWriter(inst.kind)
    cand = set(range(g.n))
    clique: list[int] = []
    while pending:
        pool = pending & cand
        if not pool:
            raise TraceError("supplied nodes do not form a clique")
        u = _pick(pool, lambda x: sum(1 for y in g.adjacency[x] if y in cand))
        pending.discard(u)
        clique.append(u)
        cand.intersection_update(g.adjacency[u])
        w.emit("mcp.add", u=u)
        w.emit("mcp.current", nodes=clique)
        if cand:
            w.emit("mcp.common", nodes=sorted(cand))
    if cand:
        raise TraceError("supplied clique is not maximal")
    w.emit("finished")
    w.emit("mcp.final", nodes=clique)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(clique)))


def trace_tsp(inst: TaskInstance, solution: Solution | None = None) -> ThoughtTrace:
    assert inst.kind is TaskKind.TSP
    g = inst.g
    tour = list(_optimum(inst, solution).nodes)
    if len(tour) != g.n + 1 or tour[0] != tour[-1] or sorted(tour[:-1]) != list(range(g.n)):
        raise TraceError("supplied tour is not a Hamiltonian cycle")
    w = LineWriter(inst.kind)
    w.emit("tsp.start", u=tour[0])
    for i in range(1, len(tour)):
        u, v = tour[i - 1], tour[i]
        w.emit("tsp.hop", v=v, u=u, w=g.weight(u, v))
        w.emit("tsp.current", path=tour[: i + 1])
    w.emit("finished")
    w.emit("tsp.final", path=tour)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(tour)))


def mcs_link_template(side: str, idx: list[int], total: int) -> str:
    if not idx:
        return f"mcs.{side}_none"
    if len(idx) == total:
        return f"mcs.{side}_all"
    return f"mcs.{side}_some"


def _mcs_link(w: LineWriter, side: str, adj: tuple[int, ...], u: int, listed: list[int]) -> list[int]:
    nbrs = set(adj)
    idx = [i for i, x in enumerate(listed) if x in nbrs]
    tid = mcs_link_template(side, idx, len(listed))
    if tid.endswith("none"):
        w.emit(tid, u=u)
    elif tid.endswith("all"):
        w.emit(tid, u=u, nodes=sorted(listed))
    else:
        other = [i for i in range(len(listed)) if i not in idx]
        w.emit(tid, u=u, idx=idx, nodes=[listed[i] for i in idx], other_idx=other, others=[listed[i] for i in other])
    return idx


def trace_mcs(inst: TaskInstance, solution: Solution | None = None) -> ThoughtTrace:
    assert inst.kind is TaskKind.MCS and inst.h is not None
    g, h = inst.g, inst.h
    sol = _optimum(inst, solution)
    pairs = list(zip(sol.nodes, sol.h_nodes or ()))
    if not pairs:
        raise TraceError("empty common subgraph")
    w = LineWriter(inst.kind)
    gl: list[int] = []
    hl: list[int] = []
    for u, v in pairs:
        if not gl:
            w.emit("mcs.first", u=u, v=v)
        else:
            gi = _mcs_link(w, "g", g.adjacency[u], u, gl)
            hi = _mcs_link(w, "h", h.adjacency[v], v, hl)
            if gi != hi:
                raise TraceError(f"pair ({u}, {v}) breaks the common structure")
            w.emit("mcs.choose", u=u, v=v)
        gl.append(u)
        hl.append(v)
        w.emit("mcs.current", g_nodes=gl, h_nodes=hl)
    w.emit("finished")
    w.emit("mcs.final", g_nodes=gl, h_nodes=hl)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(gl), tuple(hl)))


def ged_step(g, h, mapping: list[int], i: int, j: int) -> tuple[list[int], list[int]]:
    """Earlier G nodes whose pairing with ``i -> j`` inserts or deletes an edge."""
    inserted = [u for u, mu in enumerate(mapping) if not g.has_edge(u, i) and h.has_edge(mu, j)]
    deleted = [u for u, mu in enumerate(mapping) if g.has_edge(u, i) and not h.has_edge(mu, j)]
    return inserted, deleted


def trace_ged(inst: TaskInstance, solution: Solution | None = None) -> ThoughtTrace:
    assert inst.kind is TaskKind.GED and inst.h is not None
    g, h = inst.g, inst.h
    assert g.labels is not None and h.labels is not None
    target = list(_optimum(inst, solution).nodes)
    if sorted(target) != list(range(h.n)) or len(target) != g.n:
        raise TraceError("supplied mapping is not a bijection")
    w = LineWriter(inst.kind)
    mapping: list[int] = []
    cost = 0
    for i, j in enumerate(target):
        lg, lh = g.labels[i], h.labels[j]
        w.emit("ged.map", i=i, lg=lg, j=j, lh=lh)
        if lg == lh:
            w.emit("ged.same", i=i, j=j)
        else:
            w.emit("ged.diff", i=i, j=j)
            cost += 1
        inserted, deleted = ged_step(g, h, mapping, i, j)
        if inserted:
            w.emit("ged.insert", nodes=inserted, i=i, j=j, c=len(inserted))
        if deleted:
            w.emit("ged.delete", nodes=deleted, i=i, j=j, c=len(deleted))
        cost += len(inserted) + len(deleted)
        mapping.append(j)
        w.emit("ged.current", nodes=mapping, c=cost)
    w.emit("finished")
    w.emit("ged.final", nodes=mapping)
    return w.finish(inst.instance_id, Solution(inst.kind, tuple(mapping)))


GENERATORS: dict[TaskKind, Callable[..., ThoughtTrace]] = {
    TaskKind.NEIGHBOR: trace_neighbor,
    TaskKind.DISTANCE: trace_distance,
    TaskKind.CONNECTED: trace_connected,
    TaskKind.DIAMETER: trace_diameter,
    TaskKind.MVC: trace_mvc,
    TaskKind.MIS: trace_mis,
    TaskKind.MCP: trace_mcp,
    TaskKind.TSP: trace_tsp,
    TaskKind.MCS: trace_mcs,
    TaskKind.GED: trace_ged,
}


def generate_trace(inst: TaskInstance, solution: Solution | None = None) -> ThoughtTrace:
    """Run the task's default program on ``inst``."""
    from .spaces import default_program

    return default_program(inst.kind).run(inst, solution)
