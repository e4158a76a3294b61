"""Exact solvers for the ten tasks.

When several optima exist every solver returns the lexicographically
smallest canonical form: sorted node lists for set tasks, the smallest node
sequence for paths and tours, the smallest mapping list for GED, and the
smallest list of ``(g, h)`` pairs (sorted by ``g``) for MCS.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from ..graph import Graph, GraphError, TaskInstance, TaskKind
from . import _kernels
from .base import DEFAULT_TIME_BUDGET, Deadline, Solution

GED_EXACT_LIMIT = 10
MCS_EXACT_LIMIT = 9
MCS_NODE_BUDGET = 5_000
TSP_LIMIT = 20


def _require(inst: TaskInstance, kind: TaskKind) -> None:
    if inst.kind is not kind:
        raise ValueError(f"expected a {kind} instance, got {inst.kind}")


# ---------------------------------------------------------------------------
# Polynomial tasks


def solve_neighbor(inst: TaskInstance) -> Solution:
    _require(inst, TaskKind.NEIGHBOR)
    assert inst.query is not None
    a, b = inst.query
    common = set(inst.g.adjacency[a]) & set(inst.g.adjacency[b])
    return Solution(TaskKind.NEIGHBOR, tuple(sorted(common)))


def bfs_distances(g: Graph, source: int) -> list[int]:
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def smallest_shortest_path(g: Graph, s: int, t: int, dist_to_t: list[int] | None = None) -> list[int] | None:
    """Lexicographically smallest among the fewest-edge s-t paths."""
    if dist_to_t is None:
        dist_to_t = bfs_distances(g, t)
    if dist_to_t[s] < 0:
        return None
    path = [s]
    while path[-1] != t:
        here = dist_to_t[path[-1]]
        path.append(min(w for w in g.adjacency[path[-1]] if dist_to_t[w] == here - 1))
    return path


def solve_distance(inst: TaskInstance) -> Solution | None:
    _require(inst, TaskKind.DISTANCE)
    assert inst.query is not None
    path = smallest_shortest_path(inst.g, *inst.query)
    return None if path is None else Solution(TaskKind.DISTANCE, tuple(path))


def components(g: Graph) -> list[list[int]]:
    """Components in BFS discovery order, each started from its lowest node."""
    seen = [False] * g.n
    out = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        out.append(comp)
    return out


def solve_components(inst: TaskInstance) -> Solution:
    _require(inst, TaskKind.CONNECTED)
    return Solution(TaskKind.CONNECTED, tuple(comp[0] for comp in components(inst.g)))


def diameter_endpoints(g: Graph) -> tuple[int, int, int, list[list[int]]]:
    """Return ``(u, v, d, dist)`` with ``u < v`` the smallest pair at maximum distance."""
    dist = [bfs_distances(g, s) for s in range(g.n)]
    if any(d < 0 for row in dist for d in row):
        raise GraphError("diameter is undefined on a disconnected graph")
    best = (0, 0, 0)
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if dist[u][v] > best[2]:
                best = (u, v, dist[u][v])
    return best[0], best[1], best[2], dist


def solve_diameter(inst: TaskInstance) -> Solution:
    """A diameter path, walked from the larger endpoint of the smallest maximizing pair."""
    _require(inst, TaskKind.DIAMETER)
    g = inst.g
    if g.n == 0:
        raise GraphError("empty graph")
    u, v, _, dist = diameter_endpoints(g)
    path = smallest_shortest_path(g, v, u, dist[u])
    assert path is not None
    return Solution(TaskKind.DIAMETER, tuple(path))


# ---------------------------------------------------------------------------
# Clique / independent set / vertex cover on bitsets


def _color_sort(adj: list[int], cand: int) -> tuple[list[int], list[int]]:
    order: list[int] = []
    bounds: list[int] = []
    color = 0
    uncolored = cand
    while uncolored:
        color += 1
        q = uncolored
        while q:
            low = q & -q
            v = low.bit_length() - 1
            uncolored &= ~low
            q &= ~low & ~adj[v]
            order.append(v)
            bounds.append(color)
    return order, bounds


class _TargetReached(Exception):
    pass


def _max_clique(adj: list[int], cand: int, deadline: Deadline, target: int | None = None) -> tuple[int, int]:
    """Maximum clique inside ``cand``; stops early once ``target`` is reached."""
    best = [0, 0]

    def expand(members: int, size: int, pool: int) -> None:
        deadline.check()
        order, bounds = _color_sort(adj, pool)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best[0]:
                return
            v = order[i]
            bit = 1 << v
            nxt = pool & adj[v]
            if nxt:
                expand(members | bit, size + 1, nxt)
            elif size + 1 > best[0]:
                best[0], best[1] = size + 1, members | bit
                if target is not None and best[0] >= target:
                    raise _TargetReached
            pool &= ~bit

    if cand:
        try:
            expand(0, 0, cand)
        except _TargetReached:
            pass
    return best[0], best[1]


def _lex_clique(adj: list[int], cand: int, deadline: Deadline, prefer_include: bool) -> list[int]:
    """Maximum clique that is lexicographically extreme in ascending node order.

    ``prefer_include`` picks the smallest sorted clique; otherwise nodes are
    left out whenever possible, which yields the largest one.
    """
    need, _ = _max_clique(adj, cand, deadline)
    chosen: list[int] = []
    pool = cand
    v = 0
    while need > 0:
        while not (pool >> v) & 1:
            v += 1
        bit = 1 << v
        if prefer_include:
            with_v = need == 1 or _max_clique(adj, pool & adj[v], deadline, need - 1)[0] >= need - 1
            take = with_v
        else:
            without_v = _max_clique(adj, pool & ~bit, deadline, need)[0] >= need
            take = not without_v
        if take:
            chosen.append(v)
            pool &= adj[v]
            need -= 1
        else:
            pool &= ~bit
        v += 1
    return chosen


def _complement_masks(g: Graph) -> list[int]:
    full = (1 << g.n) - 1
    return [full & ~m & ~(1 << u) for u, m in enumerate(g.adj_masks)]


def solve_mcp(inst: TaskInstance, time_budget: float | None = DEFAULT_TIME_BUDGET) -> Solution:
    _require(inst, TaskKind.MCP)
    g = inst.g
    clique = _lex_clique(list(g.adj_masks), (1 << g.n) - 1, Deadline(time_budget), True)
    return Solution(TaskKind.MCP, tuple(clique))


def maximum_independent_set(g: Graph, time_budget: float | None = DEFAULT_TIME_BUDGET, smallest: bool = True) -> list[int]:
    return _lex_clique(_complement_masks(g), (1 << g.n) - 1, Deadline(time_budget), smallest)


def solve_mis(inst: TaskInstance, time_budget: float | None = DEFAULT_TIME_BUDGET) -> Solution:
    _require(inst, TaskKind.MIS)
    return Solution(TaskKind.MIS, tuple(maximum_independent_set(inst.g, time_budget)))


def solve_mvc(inst: TaskInstance, time_budget: float | None = DEFAULT_TIME_BUDGET) -> Solution:
    """Minimum vertex cover as the node complement of a maximum independent set."""
    _require(inst, TaskKind.MVC)
    g = inst.g
    # the smallest sorted cover is the complement of the largest sorted independent set
    keep = set(maximum_independent_set(g, time_budget, smallest=False))
    return Solution(TaskKind.MVC, tuple(u for u in range(g.n) if u not in keep))


# ---------------------------------------------------------------------------
# TSP: Held-Karp


def _weight_matrix(g: Graph) -> np.ndarray:
    w = np.zeros((g.n, g.n), dtype=np.int64)
    for (u, v), wt in zip(g.edges, g.weights or ()):
        w[u, v] = w[v, u] = wt
    return w


def held_karp(w: np.ndarray) -> tuple[int, list[int]]:
    """Optimal closed tour from node 0, smallest node sequence among optima."""
    n = w.shape[0]
    if n == 1:
        return 0, [0, 0]
    if n == 2:
        return int(2 * w[0, 1]), [0, 1, 0]
    m = n - 1
    table = _kernels.held_karp_table(w)
    full = (1 << m) - 1

    def completion(cur: int, rest: int) -> int:
        # cheapest path cur -> (all of rest) -> 0, via the table read backwards
        if rest == 0:
            return int(w[cur, 0])
        return min(int(table[rest, r]) + int(w[r + 1, cur]) for r in range(m) if (rest >> r) & 1)

    opt = completion(0, full)
    tour = [0]
    spent = 0
    rest = full
    while rest:
        cur = tour[-1]
        for r in range(m):
            if (rest >> r) & 1:
                step = int(w[cur, r + 1])
                if spent + step + completion(r + 1, rest & ~(1 << r)) == opt:
                    tour.append(r + 1)
                    spent += step
                    rest &= ~(1 << r)
                    break
        else:  # pragma: no cover - the table guarantees a continuation
            raise AssertionError("Held-Karp reconstruction failed")
    tour.append(0)
    return opt, tour


def solve_tsp(inst: TaskInstance) -> Solution:
    _require(inst, TaskKind.TSP)
    g = inst.g
    if not g.is_complete or g.weights is None:
        raise GraphError("TSP needs a complete weighted graph")
    if g.n > TSP_LIMIT:
        raise GraphError(f"Held-Karp limited to {TSP_LIMIT} nodes, got {g.n}")
    _, tour = held_karp(_weight_matrix(g))
    return Solution(TaskKind.TSP, tuple(tour))


def tour_weight(g: Graph, tour: list[int] | tuple[int, ...]) -> int:
    return sum(g.weight(a, b) for a, b in zip(tour, tour[1:]))


# ---------------------------------------------------------------------------
# MCS: partition-refinement backtracking


class _BudgetExhausted(Exception):
    pass


def _mcs_search(g: Graph, h: Graph, deadline: Deadline, node_budget: int | None,
                incumbent: list[tuple[int, int]] | None = None) -> tuple[list[tuple[int, int]], bool]:
    """Maximum common induced subgraph.

    Unmatched vertices are grouped into classes of mutually compatible
    (G, H) candidates, i.e. vertices with identical adjacency patterns to
    the pairs matched so far.  Branching always takes the smallest G vertex
    still in play, tries its H partners in ascending order and then leaves
    it unmatched, so the first maximum found is the smallest pair list.
    A budgeted search starts from ``incumbent`` so it never returns less.
    Returns ``(pairs, complete)``.
    """
    gadj, hadj = g.adj_masks, h.adj_masks
    best: list[tuple[int, int]] = list(incumbent or [])
    nodes = [0]

    def bound(classes: list[tuple[list[int], list[int]]]) -> int:
        return sum(min(len(gs), len(hs)) for gs, hs in classes)

    def search(classes: list[tuple[list[int], list[int]]], pairs: list[tuple[int, int]]) -> None:
        nonlocal best
        deadline.check()
        nodes[0] += 1
        if node_budget is not None and nodes[0] > node_budget:
            raise _BudgetExhausted
        if len(pairs) > len(best):
            best = list(pairs)
        if len(pairs) + bound(classes) <= len(best):
            return
        ci = min(range(len(classes)), key=lambda i: classes[i][0][0])
        gs, hs = classes[ci]
        v = gs[0]
        rest_g = gs[1:]
        for w in hs:
            rest_h = [x for x in hs if x != w]
            refined = []
            for j, (cg, ch) in enumerate(classes):
                if j == ci:
                    cg, ch = rest_g, rest_h
                gi = [x for x in cg if (gadj[v] >> x) & 1]
                go = [x for x in cg if not (gadj[v] >> x) & 1]
                hi = [x for x in ch if (hadj[w] >> x) & 1]
                ho = [x for x in ch if not (hadj[w] >> x) & 1]
                if gi and hi:
                    refined.append((gi, hi))
                if go and ho:
                    refined.append((go, ho))
            pairs.append((v, w))
            search(refined, pairs)
            pairs.pop()
        remaining = list(classes)
        if rest_g:
            remaining[ci] = (rest_g, hs)
        else:
            del remaining[ci]
        search(remaining, pairs)

    start = [(list(range(g.n)), list(range(h.n)))] if g.n and h.n else []
    try:
        search(start, [])
    except _BudgetExhausted:
        return best, False
    return best, True


def solve_mcs(inst: TaskInstance, time_budget: float | None = DEFAULT_TIME_BUDGET) -> Solution:
    _require(inst, TaskKind.MCS)
    assert inst.h is not None
    small = min(inst.g.n, inst.h.n) <= MCS_EXACT_LIMIT
    if small:
        pairs, complete = _mcs_search(inst.g, inst.h, Deadline(time_budget), None)
    else:
        from .heuristic import mcs_greedy

        pairs, complete = _mcs_search(inst.g, inst.h, Deadline(None), MCS_NODE_BUDGET, mcs_greedy(inst.g, inst.h))
    return Solution(
        TaskKind.MCS,
        tuple(p[0] for p in pairs),
        tuple(p[1] for p in pairs),
        exact=complete,
    )


# ---------------------------------------------------------------------------
# GED: branch and bound over partial assignments


def mapping_cost(g: Graph, h: Graph, mapping: list[int] | tuple[int, ...]) -> int:
    assert g.labels is not None and h.labels is not None
    cost = sum(1 for i, j in enumerate(mapping) if g.labels[i] != h.labels[j])
    for i in range(len(mapping)):
        for p in range(i):
            if g.has_edge(p, i) != h.has_edge(mapping[p], mapping[i]):
                cost += 1
    return cost


def _label_excess(g_labels: list[str], h_labels: list[str]) -> int:
    counts: dict[str, int] = {}
    for lab in g_labels:
        counts[lab] = counts.get(lab, 0) + 1
    matched = 0
    for lab in h_labels:
        if counts.get(lab, 0) > 0:
            counts[lab] -= 1
            matched += 1
    return len(g_labels) - matched


def ged_branch_and_bound(g: Graph, h: Graph, upper: int, deadline: Deadline) -> tuple[int, list[int]] | None:
    """Smallest mapping list with cost ``< upper``, mapping G nodes 0, 1, 2, ... in turn.

    The bound adds three independent cost parts for the unmapped remainder:
    unavoidable label mismatches, degree differences between each mapped
    node and the unmapped nodes, and the edge-count difference among the
    unmapped nodes themselves.
    """
    assert g.labels is not None and h.labels is not None
    n = g.n
    gl, hl = g.labels, h.labels
    gadj, hadj = g.adj_masks, h.adj_masks
    full = (1 << n) - 1
    best: list[int] | None = None
    best_cost = upper
    mapping: list[int] = []

    def lower_bound(i: int, used: int) -> int:
        g_rest = full & ~((1 << i) - 1)
        h_rest = full & ~used
        lb = _label_excess([gl[x] for x in range(i, n)], [hl[y] for y in range(n) if (h_rest >> y) & 1])
        for p in range(i):
            lb += abs(bin(gadj[p] & g_rest).count("1") - bin(hadj[mapping[p]] & h_rest).count("1"))
        eg = sum(bin(gadj[x] & g_rest).count("1") for x in range(i, n)) // 2
        eh = sum(bin(hadj[y] & h_rest).count("1") for y in range(n) if (h_rest >> y) & 1) // 2
        return lb + abs(eg - eh)

    def search(i: int, used: int, cost: int) -> None:
        nonlocal best, best_cost
        deadline.check()
        if i == n:
            if cost < best_cost:
                best_cost, best = cost, list(mapping)
            return
        if cost + lower_bound(i, used) >= best_cost:
            return
        for j in range(n):
            if (used >> j) & 1:
                continue
            step = gl[i] != hl[j]
            gi, hj = gadj[i], hadj[j]
            for p in range(i):
                if ((gi >> p) & 1) != ((hj >> mapping[p]) & 1):
                    step += 1
            if cost + step >= best_cost:
                continue
            mapping.append(j)
            search(i + 1, used | (1 << j), cost + step)
            mapping.pop()

    search(0, 0, 0)
    return None if best is None else (best_cost, best)


def solve_ged(inst: TaskInstance, time_budget: float | None = DEFAULT_TIME_BUDGET) -> Solution:
    _require(inst, TaskKind.GED)
    from .heuristic import ged_local_search

    g, h = inst.g, inst.h
    assert h is not None
    if g.n != h.n:
        raise GraphError("GED needs equal node counts")
    start = ged_local_search(g, h)
    if g.n > GED_EXACT_LIMIT:
        return Solution(TaskKind.GED, tuple(start), exact=False)
    found = ged_branch_and_bound(g, h, mapping_cost(g, h, start) + 1, Deadline(time_budget))
    assert found is not None
    return Solution(TaskKind.GED, tuple(found[1]))


_DISPATCH = {
    TaskKind.NEIGHBOR: solve_neighbor,
    TaskKind.DISTANCE: solve_distance,
    TaskKind.CONNECTED: solve_components,
    TaskKind.DIAMETER: solve_diameter,
    TaskKind.TSP: solve_tsp,
}


def solve(inst: TaskInstance, time_budget: float | None = DEFAULT_TIME_BUDGET) -> Solution | None:
    """Optimal (or flagged best-effort) solution; ``None`` only for an unreachable Distance query."""
    kind = inst.kind
    if kind in _DISPATCH:
        return _DISPATCH[kind](inst)
    budgeted = {
        TaskKind.MCP: solve_mcp,
        TaskKind.MIS: solve_mis,
        TaskKind.MVC: solve_mvc,
        TaskKind.MCS: solve_mcs,
        TaskKind.GED: solve_ged,
    }
    return budgeted[kind](inst, time_budget)
