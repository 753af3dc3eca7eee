"""Forward push (local update) producing reserves and residues."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph


@dataclass
class PushState:
    """Reserve/residue vectors after a (possibly partial) push.

    ``residue`` is stored densely; ``cost`` counts out-edges touched (one unit
    per dangling absorption) and ``pushes`` the number of push operations.
    """

    reserve: np.ndarray
    residue: np.ndarray
    r_sum: float
    initial_mass: float = 1.0
    cost: int = 0
    pushes: int = 0

    def residue_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.residue > 0.0)

    def mass(self) -> float:
        return math.fsum(self.reserve) + math.fsum(self.residue)


def _run(g: Graph, residue: np.ndarray, candidates: np.ndarray, alpha: float, r_max: float,
         budget_coef: float, max_pushes: int | None, backend) -> PushState:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    reserve = np.zeros(g.n, dtype=np.float64)
    initial = math.fsum(residue)
    k = _kernels.get(backend)
    cost, pushes, _ = k.push(
        g.offsets, g.targets, reserve, residue, candidates, float(alpha), float(r_max),
        float(initial), float(budget_coef), -1 if max_pushes is None else int(max_pushes),
    )
    return PushState(reserve, residue, float(np.sum(residue)), initial, int(cost), int(pushes))


def forward_push(g: Graph, source: int, alpha: float, r_max: float, *,
                 max_pushes: int | None = None, backend=None) -> PushState:
    """Push from a single source until every residue is below its threshold.

    Non-dangling ``v`` is pushed while ``r(v) > r_max * deg(v)``; a dangling
    node absorbs any positive residue into its reserve. ``max_pushes`` cuts
    the run short, which is how tests inspect intermediate states.
    """
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range")
    residue = np.zeros(g.n, dtype=np.float64)
    residue[source] = 1.0
    return _run(g, residue, np.array([source], dtype=np.int64), alpha, r_max, -1.0,
                max_pushes, backend)


def as_distribution(g: Graph, sigma) -> np.ndarray:
    """Dense probability vector from a dict ``{node: prob}`` or an array."""
    if isinstance(sigma, dict):
        vec = np.zeros(g.n, dtype=np.float64)
        for v, p in sigma.items():
            if not 0 <= v < g.n:
                raise IndexError(f"node {v} out of range")
            vec[v] += p
    else:
        vec = np.array(sigma, dtype=np.float64).ravel()
        if vec.size != g.n:
            raise ValueError(f"distribution has {vec.size} entries, graph has {g.n} nodes")
    if np.any(vec < 0) or not np.all(np.isfinite(vec)):
        raise ValueError("distribution entries must be finite and non-negative")
    if abs(math.fsum(vec) - 1.0) > 1e-9:
        raise ValueError(f"distribution sums to {math.fsum(vec)!r}, expected 1")
    return vec


def forward_push_from_distribution(g: Graph, sigma, alpha: float, r_max: float, *,
                                   max_pushes: int | None = None, backend=None) -> PushState:
    """Forward push whose initial residue is ``sigma`` instead of a point mass."""
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    residue = as_distribution(g, sigma).copy()
    return _run(g, residue, np.flatnonzero(residue > 0).astype(np.int64), alpha, r_max, -1.0,
                max_pushes, backend)


def forward_push_budgeted(g: Graph, source: int, alpha: float, rc: float,
                          walks_per_residue: float, r_max: float = 0.0, *,
                          max_pushes: int | None = None, backend=None) -> PushState:
    """Push while accumulated edge cost stays below the estimated walk cost.

    The remaining walk cost is ``rc * walks_per_residue * r_sum``, re-evaluated
    after every push from the running residue sum. ``r_max`` is a floor on
    the push threshold; 0 lets the budget alone decide. ``walks_per_residue``
    may be ``math.inf`` for an unbounded budget.
    """
    if r_max < 0 or rc < 0 or walks_per_residue < 0:
        raise ValueError("r_max, rc and walks_per_residue must be non-negative")
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range")
    coef = 0.0 if rc == 0 else rc * walks_per_residue
    if math.isinf(coef):
        coef = -1.0
    residue = np.zeros(g.n, dtype=np.float64)
    residue[source] = 1.0
    return _run(g, residue, np.array([source], dtype=np.int64), alpha, r_max, coef,
                max_pushes, backend)
