"""Greedy and random baselines for the six NP-hard tasks."""
from __future__ import annotations

import random

from ..graph import NP_HARD_TASKS, Graph, TaskInstance, TaskKind
from .base import Solution


def _greedy_mis(g: Graph) -> list[int]:
    alive = set(range(g.n))
    chosen = []
    while alive:
        u = min(alive, key=lambda x: (len(alive.intersection(g.adjacency[x])), x))
        chosen.append(u)
        alive.discard(u)
        alive.difference_update(g.adjacency[u])
    return sorted(chosen)


def _greedy_mvc(g: Graph) -> list[int]:
    edges = set(g.edges)
    cover = []
    while edges:
        deg: dict[int, int] = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        u = min(deg, key=lambda x: (-deg[x], x))
        cover.append(u)
        edges = {e for e in edges if u not in e}
    return sorted(cover)


def _greedy_mcp(g: Graph) -> list[int]:
    if g.n == 0:
        return []
    seed = min(range(g.n), key=lambda x: (-g.degree(x), x))
    clique = [seed]
    cand = set(g.adjacency[seed])
    while cand:
        u = min(cand, key=lambda x: (-g.degree(x), x))
        clique.append(u)
        cand.intersection_update(g.adjacency[u])
    return sorted(clique)


def _nearest_neighbor_tour(g: Graph) -> list[int]:
    tour = [0]
    left = set(range(1, g.n))
    while left:
        cur = tour[-1]
        nxt = min(left, key=lambda x: (g.weight(cur, x), x))
        tour.append(nxt)
        left.discard(nxt)
    tour.append(0)
    return tour


def _compatible(g: Graph, h: Graph, pairs: list[tuple[int, int]], u: int, v: int) -> bool:
    return all(g.has_edge(u, a) == h.has_edge(v, b) for a, b in pairs)


def _mcs_pairing(g: Graph, h: Graph, rng: random.Random | None) -> list[tuple[int, int]]:
    """Pair vertices one at a time, keeping the partial map induced-isomorphic."""
    pairs: list[tuple[int, int]] = []
    g_left = list(range(g.n))
    if rng is not None:
        rng.shuffle(g_left)
    else:
        g_left.sort(key=lambda x: (-g.degree(x), x))
    h_free = set(range(h.n))
    for u in g_left:
        options = [v for v in sorted(h_free) if _compatible(g, h, pairs, u, v)]
        if not options:
            continue
        if rng is not None:
            v = rng.choice(options)
        else:
            v = min(options, key=lambda x: (abs(h.degree(x) - g.degree(u)), x))
        pairs.append((u, v))
        h_free.discard(v)
    pairs.sort()
    return pairs


def mcs_greedy(g: Graph, h: Graph) -> list[tuple[int, int]]:
    return _mcs_pairing(g, h, None)


def _ged_step_cost(g: Graph, h: Graph, mapping: dict[int, int], i: int, j: int) -> int:
    assert g.labels is not None and h.labels is not None
    cost = int(g.labels[i] != h.labels[j])
    for p, q in mapping.items():
        cost += g.has_edge(p, i) != h.has_edge(q, j)
    return cost


def ged_greedy(g: Graph, h: Graph) -> list[int]:
    mapping: dict[int, int] = {}
    free = set(range(h.n))
    for i in range(g.n):
        j = min(free, key=lambda x: (_ged_step_cost(g, h, mapping, i, x), x))
        mapping[i] = j
        free.discard(j)
    return [mapping[i] for i in range(g.n)]


def _swap_delta(g: Graph, h: Graph, m: list[int], a: int, b: int) -> int:
    """Cost change from exchanging the images of ``a`` and ``b``."""
    assert g.labels is not None and h.labels is not None
    gl, hl = g.labels, h.labels
    ma, mb = m[a], m[b]
    delta = (gl[a] != hl[mb]) + (gl[b] != hl[ma]) - (gl[a] != hl[ma]) - (gl[b] != hl[mb])
    ga, gb = g.adj_masks[a], g.adj_masks[b]
    ha, hb = h.adj_masks[ma], h.adj_masks[mb]
    for p, mp in enumerate(m):
        if p == a or p == b:
            continue
        ea, eb = (ga >> p) & 1, (gb >> p) & 1
        fa, fb = (ha >> mp) & 1, (hb >> mp) & 1
        delta += (ea != fb) + (eb != fa) - (ea != fa) - (eb != fb)
    return delta


def ged_local_search(g: Graph, h: Graph, start: list[int] | None = None) -> list[int]:
    """Greedy assignment improved by pairwise swaps until no swap helps."""
    best = ged_greedy(g, h) if start is None else list(start)
    improved = True
    while improved:
        improved = False
        for a in range(g.n):
            for b in range(a + 1, g.n):
                if _swap_delta(g, h, best, a, b) < 0:
                    best[a], best[b] = best[b], best[a]
                    improved = True
    return best


def _random_maximal_independent(g: Graph, rng: random.Random) -> list[int]:
    order = list(range(g.n))
    rng.shuffle(order)
    chosen: set[int] = set()
    for u in order:
        if not chosen.intersection(g.adjacency[u]):
            chosen.add(u)
    return sorted(chosen)


def _random_cover(g: Graph, rng: random.Random) -> list[int]:
    cover: set[int] = set()
    edges = list(g.edges)
    rng.shuffle(edges)
    for u, v in edges:
        if u not in cover and v not in cover:
            cover.add(rng.choice((u, v)))
    return sorted(cover)


def _random_clique(g: Graph, rng: random.Random) -> list[int]:
    if g.n == 0:
        return []
    clique = [rng.randrange(g.n)]
    cand = set(g.adjacency[clique[0]])
    while cand:
        u = rng.choice(sorted(cand))
        clique.append(u)
        cand.intersection_update(g.adjacency[u])
    return sorted(clique)


def heuristic_solve(inst: TaskInstance, strategy: str = "greedy", seed: int = 0) -> Solution:
    """A valid but not necessarily optimal solution.

    ``strategy`` is ``"greedy"`` or ``"random"``; ``seed`` only matters for
    the random strategy.
    """
    kind = inst.kind
    if kind not in NP_HARD_TASKS:
        raise ValueError(f"no heuristic baseline for polynomial task {kind}")
    if strategy not in ("greedy", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    g = inst.g
    rng = random.Random(seed) if strategy == "random" else None
    if kind is TaskKind.MIS:
        nodes = _greedy_mis(g) if rng is None else _random_maximal_independent(g, rng)
    elif kind is TaskKind.MVC:
        nodes = _greedy_mvc(g) if rng is None else _random_cover(g, rng)
    elif kind is TaskKind.MCP:
        nodes = _greedy_mcp(g) if rng is None else _random_clique(g, rng)
    elif kind is TaskKind.TSP:
        if rng is None:
            nodes = _nearest_neighbor_tour(g)
        else:
            middle = list(range(1, g.n))
            rng.shuffle(middle)
            nodes = [0, *middle, 0]
    elif kind is TaskKind.MCS:
        assert inst.h is not None
        pairs = _mcs_pairing(g, inst.h, rng)
        return Solution(kind, tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), exact=False)
    else:
        assert inst.h is not None
        if rng is None:
            nodes = ged_greedy(g, inst.h)
        else:
            nodes = list(range(g.n))
            rng.shuffle(nodes)
    return Solution(kind, tuple(nodes), exact=False)
