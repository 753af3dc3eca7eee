"""Small synthetic graphs for tests and benchmarks; deterministic given a seed."""

from __future__ import annotations

import numpy as np

from .graph import Graph

KINDS = ("erdos-renyi", "ba-preferential", "star", "cycle", "path")


def erdos_renyi(n: int, m: int, seed: int = 0) -> Graph:
    """``m`` distinct directed edges drawn uniformly, no self-loops."""
    total = n * (n - 1)
    if not 0 <= m <= total:
        raise ValueError(f"m must be in [0, {total}] for n={n}")
    rng = np.random.default_rng(seed)
    if m > total // 4:
        codes = rng.choice(total, size=m, replace=False)
    else:
        codes = np.empty(0, dtype=np.int64)
        while codes.size < m:
            extra = rng.integers(0, total, size=2 * (m - codes.size) + 8)
            merged = np.concatenate([codes, extra])
            _, first = np.unique(merged, return_index=True)
            codes = merged[np.sort(first)][:m]
    src = codes // (n - 1)
    dst = codes % (n - 1)
    dst = dst + (dst >= src)
    order = np.lexsort((dst, src))
    return Graph.from_edges(src[order], dst[order], n)


def ba_preferential(n: int, degree: int, seed: int = 0) -> Graph:
    """Barabasi-Albert growth; every undirected edge is stored in both directions."""
    if degree < 1 or n <= degree:
        raise ValueError("need 1 <= degree < n")
    rng = np.random.default_rng(seed)
    src, dst = [], []
    pool = list(range(degree))
    for v in range(degree, n):
        chosen = set()
        while len(chosen) < degree:
            chosen.add(pool[int(rng.integers(len(pool)))])
        for u in sorted(chosen):
            src += [v, u]
            dst += [u, v]
            pool += [v, u]
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    order = np.lexsort((dst, src))
    return Graph.from_edges(src[order], dst[order], n)


def star(n: int) -> Graph:
    """Hub 0 pointing at every other node; the leaves are dangling."""
    return Graph.from_edges(np.zeros(n - 1, dtype=np.int64), np.arange(1, n), n)


def cycle(n: int) -> Graph:
    v = np.arange(n)
    return Graph.from_edges(v, (v + 1) % n, n)


def path(n: int) -> Graph:
    v = np.arange(n - 1)
    return Graph.from_edges(v, v + 1, n)


def generate(kind: str, n: int, m: int | None = None, seed: int = 0) -> Graph:
    """Dispatch by name. ``m`` is the edge count for erdos-renyi and the per-node degree for ba."""
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "erdos-renyi":
        return erdos_renyi(n, 5 * n if m is None else m, seed)
    if kind == "ba-preferential":
        return ba_preferential(n, 3 if m is None else m, seed)
    if kind == "star":
        return star(n)
    if kind == "cycle":
        return cycle(n)
    if kind == "path":
        return path(n)
    raise ValueError(f"unknown graph kind {kind!r}; choose from {', '.join(KINDS)}")
