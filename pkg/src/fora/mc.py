"""Plain Monte-Carlo estimator: all walks start at the source."""

from __future__ import annotations

import numpy as np

from .graph import Graph, QueryParams
from .query import PprEstimate, walk_count
from .walks import WalkRng, as_rng, walk_terminals


def mc_whole_graph(g: Graph, source: int, params: QueryParams, rng: WalkRng | int = 0, *,
                   backend=None) -> PprEstimate:
    """Fraction of ``ceil(omega)`` walks from ``source`` that end at each node.

    ``omega = log_term / (eps^2 * delta)``, the walk budget FORA would use with
    no push at all, so walk counts of the two methods compare like for like.
    Walk ``j`` uses the same keyed stream as FORA's ``j``-th walk from the source.
    """
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range")
    omega = params.walks_per_residue
    count = max(1, walk_count(omega))
    ends = walk_terminals(g, source, params.alpha, as_rng(rng).seed, count, backend=backend)
    scores = np.bincount(ends, minlength=g.n) / count
    return PprEstimate(scores, count, 0, np.zeros(g.n), 1.0, omega)
