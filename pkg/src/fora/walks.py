"""Alpha-terminating random walks driven by a counter-based keyed RNG.

Each walk draws from a stream keyed by ``(seed, start node, walk index)``,
so the terminal of walk ``j`` from node ``v`` does not depend on which other
walks were generated before it. Online queries and the precomputed index
rely on this to agree exactly.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from . import _kernels
from .graph import Graph

M64 = (1 << 64) - 1


class WalkRng:
    """Seed holder plus a per-start-node walk counter for ad-hoc walks.

    Query functions only read :attr:`seed`; they always number walks from 0,
    which makes every query a pure function of ``(graph, params, seed)``.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & M64
        self._issued: defaultdict[int, int] = defaultdict(int)

    def next_index(self, node: int) -> int:
        j = self._issued[node]
        self._issued[node] = j + 1
        return j

    def key(self, node: int, walk: int) -> int:
        return _kernels.active.walk_key(self.seed, int(node), int(walk))

    def __repr__(self):
        return f"WalkRng(seed={self.seed})"


def as_rng(rng) -> WalkRng:
    if isinstance(rng, WalkRng):
        return rng
    return WalkRng(0 if rng is None else rng)


def random_walk(g: Graph, start: int, alpha: float, rng: WalkRng, *, backend=None) -> int:
    """Terminal node of one walk from ``start``; dangling nodes stop the walk."""
    if not 0 <= start < g.n:
        raise IndexError(f"start node {start} out of range")
    k = _kernels.get(backend)
    j = rng.next_index(start)
    return int(k.random_walk(g.offsets, g.targets, start, alpha, rng.seed, j, False))


def random_walk_skip_zero_hop(g: Graph, start: int, alpha: float, rng: WalkRng, *,
                              backend=None) -> int:
    """Walk that first moves to a uniform out-neighbor, so it never stops at hop 0.

    A dangling ``start`` is returned unchanged.
    """
    if not 0 <= start < g.n:
        raise IndexError(f"start node {start} out of range")
    k = _kernels.get(backend)
    j = rng.next_index(start)
    return int(k.random_walk(g.offsets, g.targets, start, alpha, rng.seed, j, True))


def walk_terminals(g: Graph, start: int, alpha: float, seed: int, count: int,
                   skip_zero_hop: bool = False, *, backend=None) -> np.ndarray:
    """Terminals of walks ``0..count-1`` from ``start``, as stored in an index."""
    counts = np.zeros(g.n, dtype=np.int64)
    counts[start] = count
    out = np.zeros(count, dtype=np.uint32)
    k = _kernels.get(backend)
    # build_walks is node-major, so only start's slice is populated
    k.build_walks(g.offsets, g.targets, counts, float(alpha), int(seed) & M64,
                  bool(skip_zero_hop), out)
    return out
