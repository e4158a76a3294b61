"""Compiled inner loops."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def held_karp_table(w):  # pragma: no cover - compiled
    """``table[S, j]``: cheapest path from node 0 through node set S ending at j.

    Nodes ``1..n-1`` are bits ``0..n-2`` of S; ``j`` is a bit index.
    """
    n = w.shape[0]
    m = n - 1
    size = 1 << m
    inf = np.iinfo(np.int64).max // 4
    table = np.full((size, m), inf, dtype=np.int64)
    for j in range(m):
        table[1 << j, j] = w[0, j + 1]
    for mask in range(1, size):
        for j in range(m):
            bit = 1 << j
            if (mask & bit) == 0 or mask == bit:
                continue
            prev = mask ^ bit
            best = inf
            for i in range(m):
                if prev & (1 << i):
                    c = table[prev, i] + w[i + 1, j + 1]
                    if c < best:
                        best = c
            table[mask, j] = best
    return table
