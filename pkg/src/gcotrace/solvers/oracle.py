"""Brute-force ground truth for small instances.

Deliberately shares nothing with the exact solvers beyond the graph type:
everything here is plain enumeration over edge lists.  Ties resolve to the
same canonical forms the exact solvers use, so results can be compared for
equality, not just objective value.
"""
from __future__ import annotations

from itertools import combinations, permutations

from ..graph import TaskInstance, TaskKind
from .base import Solution

SUBSET_LIMIT = 8
TSP_LIMIT = 9
PAIR_LIMIT = 6


class OracleLimitError(ValueError):
    pass


def _edge_lookup(edges) -> set[tuple[int, int]]:
    out = set()
    for u, v in edges:
        out.add((u, v))
        out.add((v, u))
    return out


def _all_pairs_hops(n: int, edges) -> list[list[float]]:
    inf = float("inf")
    d = [[0.0 if i == j else inf for j in range(n)] for i in range(n)]
    for u, v in edges:
        d[u][v] = d[v][u] = 1.0
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def _simple_paths(n: int, adj: set[tuple[int, int]], s: int, t: int, length: int) -> list[tuple[int, ...]]:
    """Every simple s-t path with exactly ``length`` edges, in lexicographic order."""
    found = []

    def walk(path: list[int]) -> None:
        if len(path) - 1 == length:
            if path[-1] == t:
                found.append(tuple(path))
            return
        for w in range(n):
            if (path[-1], w) in adj and w not in path:
                path.append(w)
                walk(path)
                path.pop()

    walk([s])
    return found


def _is_independent(nodes, adj) -> bool:
    return all((u, v) not in adj for u, v in combinations(nodes, 2))


def _is_clique(nodes, adj) -> bool:
    return all((u, v) in adj for u, v in combinations(nodes, 2))


def oracle_solve(inst: TaskInstance) -> Solution | None:
    kind = inst.kind
    g = inst.g
    n = g.n
    adj = _edge_lookup(g.edges)
    limit = {TaskKind.TSP: TSP_LIMIT, TaskKind.MCS: PAIR_LIMIT, TaskKind.GED: PAIR_LIMIT}.get(kind, SUBSET_LIMIT)
    sizes = [n] if inst.h is None else [n, inst.h.n]
    if max(sizes) > limit:
        raise OracleLimitError(f"{kind} oracle handles at most {limit} nodes")

    if kind is TaskKind.NEIGHBOR:
        a, b = inst.query  # type: ignore[misc]
        return Solution(kind, tuple(u for u in range(n) if (u, a) in adj and (u, b) in adj))

    if kind is TaskKind.DISTANCE:
        s, t = inst.query  # type: ignore[misc]
        d = _all_pairs_hops(n, g.edges)[s][t]
        if d == float("inf"):
            return None
        return Solution(kind, _simple_paths(n, adj, s, t, int(d))[0])

    if kind is TaskKind.CONNECTED:
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                x = parent[x]
            return x

        for u, v in g.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        return Solution(kind, tuple(sorted({find(u) for u in range(n)})))

    if kind is TaskKind.DIAMETER:
        d = _all_pairs_hops(n, g.edges)
        pairs = [(d[u][v], u, v) for u in range(n) for v in range(u + 1, n)]
        if not pairs:
            return Solution(kind, (0,))
        if any(x == float("inf") for x, _, _ in pairs):
            raise ValueError("disconnected graph has no diameter")
        top = max(x for x, _, _ in pairs)
        _, u, v = min(p for p in pairs if p[0] == top)
        return Solution(kind, _simple_paths(n, adj, v, u, int(top))[0])

    if kind in (TaskKind.MIS, TaskKind.MCP):
        test = _is_independent if kind is TaskKind.MIS else _is_clique
        for k in range(n, 0, -1):
            for nodes in combinations(range(n), k):
                if test(nodes, adj):
                    return Solution(kind, nodes)
        return Solution(kind, ())

    if kind is TaskKind.MVC:
        for k in range(0, n + 1):
            for nodes in combinations(range(n), k):
                chosen = set(nodes)
                if all(u in chosen or v in chosen for u, v in g.edges):
                    return Solution(kind, nodes)

    if kind is TaskKind.TSP:
        w = {}
        for (u, v), wt in zip(g.edges, g.weights or ()):
            w[(u, v)] = w[(v, u)] = wt
        best = None
        for middle in permutations(range(1, n)):
            tour = (0, *middle, 0)
            cost = sum(w[(a, b)] for a, b in zip(tour, tour[1:])) if n > 1 else 0
            if best is None or cost < best[0]:
                best = (cost, tour)
        assert best is not None
        return Solution(kind, best[1])

    if kind is TaskKind.MCS:
        h = inst.h
        assert h is not None
        hadj = _edge_lookup(h.edges)
        for k in range(min(n, h.n), 0, -1):
            found = []
            for sub_g in combinations(range(n), k):
                for sub_h in permutations(range(h.n), k):
                    if all(
                        ((sub_g[i], sub_g[j]) in adj) == ((sub_h[i], sub_h[j]) in hadj)
                        for i in range(k)
                        for j in range(i + 1, k)
                    ):
                        found.append(list(zip(sub_g, sub_h)))
            if found:
                pairs = min(found)
                return Solution(kind, tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
        return Solution(kind, (), ())

    if kind is TaskKind.GED:
        h = inst.h
        assert h is not None and g.labels is not None and h.labels is not None
        hadj = _edge_lookup(h.edges)
        best = None
        for perm in permutations(range(n)):
            cost = sum(g.labels[i] != h.labels[perm[i]] for i in range(n))
            for i, j in combinations(range(n), 2):
                cost += ((i, j) in adj) != ((perm[i], perm[j]) in hadj)
            if best is None or cost < best[0]:
                best = (cost, perm)
        assert best is not None
        return Solution(kind, tuple(best[1]))

    raise AssertionError(kind)
