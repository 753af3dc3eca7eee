"""Power-iteration ground truth and accuracy metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, QueryParams
from .push import as_distribution

TIE_RTOL = 1e-9


@dataclass
class ExactPpr:
    scores: np.ndarray
    iterations: int
    residual: float


def _source_vector(g: Graph, sigma) -> np.ndarray:
    if isinstance(sigma, (int, np.integer)):
        if not 0 <= sigma < g.n:
            raise IndexError(f"source {sigma} out of range")
        vec = np.zeros(g.n)
        vec[sigma] = 1.0
        return vec
    return as_distribution(g, sigma)


def transition_step(g: Graph, x: np.ndarray) -> np.ndarray:
    """One step of the walk chain ``x @ P``; dangling nodes keep their mass.

    Works on a vector or on a 2-d array whose rows are distributions.
    """
    deg = g.out_degrees
    dangling = deg == 0
    src = np.repeat(np.arange(g.n), deg)
    share = np.divide(x, deg, out=np.zeros_like(x), where=~dangling)
    if x.ndim == 1:
        out = np.bincount(g.targets, weights=share[src], minlength=g.n).astype(np.float64)
    else:
        out = np.zeros_like(x)
        np.add.at(out.T, g.targets, share[:, src].T)
    out += np.where(dangling, x, 0.0)
    return out


def power_iteration(g: Graph, sigma, alpha: float, iters: int = 100,
                    tol: float = 0.0) -> ExactPpr:
    """Iterate ``pi <- alpha*sigma + (1-alpha) * pi P`` from ``pi = sigma``.

    ``sigma`` is a source node id, a ``{node: prob}`` dict or a dense vector.
    Stops after ``iters`` rounds or once the L1 change drops below ``tol``.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    s = _source_vector(g, sigma)
    pi = s.copy()
    change = np.inf
    it = 0
    for it in range(1, iters + 1):
        nxt = alpha * s + (1.0 - alpha) * transition_step(g, pi)
        change = float(np.abs(nxt - pi).sum())
        pi = nxt
        if change < tol:
            break
    return ExactPpr(pi, it, change)


def ppr_matrix(g: Graph, alpha: float, iters: int = 10_000, tol: float = 1e-15) -> np.ndarray:
    """All-pairs PPR, row ``v`` holding ``pi(v, .)``. Dense; meant for small graphs."""
    eye = np.eye(g.n)
    x = eye.copy()
    for _ in range(iters):
        nxt = alpha * eye + (1.0 - alpha) * transition_step(g, x)
        change = float(np.abs(nxt - x).sum(axis=1).max()) if g.n else 0.0
        x = nxt
        if change < tol:
            break
    return x


def fixed_point_residual(g: Graph, sigma, alpha: float, pi: np.ndarray) -> float:
    s = _source_vector(g, sigma)
    return float(np.abs(alpha * s + (1.0 - alpha) * transition_step(g, pi) - pi).max())


def _scores(exact) -> np.ndarray:
    return exact.scores if isinstance(exact, ExactPpr) else np.asarray(exact, dtype=np.float64)


def true_topk(exact, k: int) -> np.ndarray:
    """Node ids of the exact top-k, highest first (ties by lower id)."""
    s = _scores(exact)
    order = np.lexsort((np.arange(s.size), -s))
    return order[:k]


def precision_at_k(returned, exact, k: int) -> float:
    """Fraction of ``returned`` that belong to the true top-k.

    Nodes whose exact score ties the k-th largest (within a relative 1e-9)
    all count as true top-k members.
    """
    returned = list(returned)
    if len(returned) != k:
        raise ValueError(f"expected {k} returned nodes, got {len(returned)}")
    s = _scores(exact)
    kth = s[true_topk(s, k)[-1]]
    cut = kth - TIE_RTOL * abs(kth)
    hits = sum(1 for v in set(returned) if s[v] >= cut)
    return hits / k


def ndcg_at_k(returned, exact, k: int) -> float:
    returned = list(returned)
    if len(returned) != k:
        raise ValueError(f"expected {k} returned nodes, got {len(returned)}")
    s = _scores(exact)
    discount = np.log2(np.arange(2, k + 2))
    dcg = float(np.sum((np.exp2(s[np.asarray(returned, dtype=np.int64)]) - 1.0) / discount))
    ideal = np.sort(s)[::-1][:k]
    z = float(np.sum((np.exp2(ideal) - 1.0) / discount))
    if z == 0.0:
        return 1.0
    return dcg / z


@dataclass
class ViolationReport:
    count: int
    eligible: int
    nodes: list = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.count / self.eligible if self.eligible else 0.0


def audit_relative_error(est, exact, params: QueryParams) -> ViolationReport:
    """Nodes with exact score above delta whose estimate misses by more than eps."""
    e = est.scores if hasattr(est, "scores") else np.asarray(est, dtype=np.float64)
    s = _scores(exact)
    if e.shape != s.shape:
        raise ValueError("estimate and exact vectors differ in length")
    eligible = s > params.delta
    bad = eligible & (np.abs(s - e) > params.epsilon * s)
    return ViolationReport(int(bad.sum()), int(eligible.sum()), np.flatnonzero(bad).tolist())
