"""Whole-graph single-source PPR estimation: forward push followed by random walks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph, QueryParams
from .push import (
    PushState,
    as_distribution,
    forward_push,
    forward_push_budgeted,
    forward_push_from_distribution,
)
from .walks import M64, WalkRng, as_rng

SNAP_RTOL = 1e-9


@dataclass
class PprEstimate:
    """Estimated PPR vector plus the bookkeeping the top-k bounds need.

    ``reserve`` and ``r_sum`` describe the push that produced the estimate and
    ``omega`` is the real-valued walk budget derived from ``r_sum``.
    """

    scores: np.ndarray
    walks_issued: int = 0
    pushes: int = 0
    reserve: np.ndarray | None = None
    r_sum: float = 0.0
    omega: float = 0.0

    def top(self, k: int) -> list[tuple[int, float]]:
        order = np.lexsort((np.arange(self.scores.size), -self.scores))[:k]
        return [(int(v), float(self.scores[v])) for v in order]


def choose_r_max(g: Graph, params: QueryParams) -> float:
    """Push threshold balancing push cost against walk cost.

    Uses ``eps/sqrt(m) * sqrt(delta / log_term)``; when that gives
    ``m * r_max > 1`` the walk bound saturates and the threshold becomes
    ``eps^2 * delta / log_term`` instead.
    """
    lt = params.log_term
    m = max(g.m, 1)
    r = params.epsilon / math.sqrt(m) * math.sqrt(params.delta / lt)
    if m * r > 1.0:
        r = params.epsilon**2 * params.delta / lt
    return r


def walk_count(x: float) -> int:
    """Ceiling that treats values within a relative 1e-9 of an integer as that integer.

    Keeps a query's per-node walk count from exceeding the index's by one
    when both are mathematically equal but rounded differently.
    """
    if x <= 0.0:
        return 0
    r = round(x)
    if r >= 1 and abs(x - r) <= SNAP_RTOL * x:
        return int(r)
    return int(math.ceil(x))


def walk_plan(walk_residue: np.ndarray, walks_per_residue: float):
    """Per-node walk counts and per-walk increments for the random-walk phase.

    Node ``v`` with residue ``r`` gets ``ceil(r * omega / r_sum)`` walks, each
    worth ``r / count``. That is the ``a_i * r_sum / omega`` increment with the
    common factors cancelled, so every node hands out exactly its residue.
    """
    nodes = np.flatnonzero(walk_residue > 0.0).astype(np.int64)
    r = walk_residue[nodes]
    counts = np.fromiter((max(1, walk_count(x)) for x in (r * walks_per_residue).tolist()),
                         dtype=np.int64, count=nodes.size)
    incs = r / counts
    return nodes, counts, incs


class OnlineWalker:
    """Simulates keyed walks on the fly."""

    def __init__(self, seed: int, backend=None):
        self.seed = int(seed) & M64
        self.backend = backend

    def run(self, g, scores, nodes, counts, incs, alpha, zero_hop) -> int:
        k = _kernels.get(self.backend)
        return int(k.walk_phase(g.offsets, g.targets, nodes, counts, incs, float(alpha),
                                self.seed, bool(zero_hop), scores))


def finish(g: Graph, state: PushState, params: QueryParams, walker, zero_hop: bool = False
           ) -> PprEstimate:
    """Turn push output into an estimate by walking from every residue-holding node.

    With ``zero_hop`` an alpha share of each residue is settled in place and
    walks for the remaining ``(1 - alpha)`` share start at a random out-neighbor.
    """
    scores = state.reserve.copy()
    if zero_hop:
        scores += params.alpha * state.residue
        walk_residue = (1.0 - params.alpha) * state.residue
    else:
        walk_residue = state.residue
    C = params.walks_per_residue
    nodes, counts, incs = walk_plan(walk_residue, C)
    walks = walker.run(g, scores, nodes, counts, incs, params.alpha, zero_hop) if nodes.size else 0
    r_sum = float(np.sum(walk_residue))
    return PprEstimate(scores, walks, state.cost, state.reserve, r_sum, r_sum * C)


def _seed(rng) -> int:
    return as_rng(rng).seed


def whole_graph_basic(g: Graph, source: int, params: QueryParams, r_max: float | None = None,
                      rng: WalkRng | int = 0, *, backend=None) -> PprEstimate:
    """Forward push to ``r_max`` then walks sized by the remaining residue sum."""
    if r_max is None:
        r_max = choose_r_max(g, params)
    state = forward_push(g, source, params.alpha, r_max, backend=backend)
    return finish(g, state, params, OnlineWalker(_seed(rng), backend))


def whole_graph_zero_hop(g: Graph, source: int, params: QueryParams, r_max: float | None = None,
                         rng: WalkRng | int = 0, *, backend=None) -> PprEstimate:
    """Fixed-threshold push with zero-hop pruning (the online twin of a zero-hop index)."""
    if r_max is None:
        r_max = choose_r_max(g, params)
    state = forward_push(g, source, params.alpha, r_max, backend=backend)
    return finish(g, state, params, OnlineWalker(_seed(rng), backend), zero_hop=True)


def whole_graph_balanced(g: Graph, source: int, params: QueryParams, rng: WalkRng | int = 0,
                         *, rc: float | None = None, r_max_floor: float = 0.0,
                         backend=None) -> PprEstimate:
    """Budgeted push that stops once its cost catches up with the walk cost, then zero-hop walks.

    ``rc`` is the expected edges per walk, ``1/alpha`` by default.
    """
    if rc is None:
        rc = 1.0 / params.alpha
    wpr = (1.0 - params.alpha) * params.walks_per_residue
    state = forward_push_budgeted(g, source, params.alpha, rc, wpr, r_max_floor, backend=backend)
    return finish(g, state, params, OnlineWalker(_seed(rng), backend), zero_hop=True)


def ppr_from_distribution(g: Graph, sigma, params: QueryParams, r_max: float | None = None,
                          rng: WalkRng | int = 0, *, backend=None) -> PprEstimate:
    """PPR with respect to a source distribution ``sigma`` (dict or dense vector)."""
    if r_max is None:
        r_max = choose_r_max(g, params)
    state = forward_push_from_distribution(g, sigma, params.alpha, r_max, backend=backend)
    return finish(g, state, params, OnlineWalker(_seed(rng), backend))


def global_pagerank(g: Graph, params: QueryParams, rng: WalkRng | int = 0,
                    r_max: float | None = None, *, backend=None) -> PprEstimate:
    """Global PageRank as PPR from the uniform distribution."""
    sigma = np.full(g.n, 1.0 / g.n)
    return ppr_from_distribution(g, sigma, params, r_max, rng, backend=backend)


__all__ = [
    "PprEstimate", "choose_r_max", "walk_count", "walk_plan", "finish", "OnlineWalker",
    "whole_graph_basic", "whole_graph_zero_hop", "whole_graph_balanced",
    "ppr_from_distribution", "global_pagerank", "as_distribution",
]
