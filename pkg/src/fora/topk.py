"""Approximate top-k PPR by repeated whole-graph estimation with a halving threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, QueryParams
from .index import IndexMismatchError, IndexWalker, WalkIndex, omega_max_all
from .mc import mc_whole_graph
from .push import forward_push
from .query import OnlineWalker, PprEstimate, choose_r_max, finish
from .walks import as_rng


# -- estimators --------------------------------------------------------------

class ForaEstimator:
    name = "fora"

    def __init__(self, seed: int = 0, zero_hop: bool = False, backend=None):
        self.seed = as_rng(seed).seed
        self.zero_hop = zero_hop
        self.backend = backend

    def estimate(self, g: Graph, source: int, params: QueryParams) -> PprEstimate:
        state = forward_push(g, source, params.alpha, choose_r_max(g, params),
                             backend=self.backend)
        return finish(g, state, params, OnlineWalker(self.seed, self.backend), self.zero_hop)


class IndexEstimator:
    """FORA whose walks are read from a prebuilt index.

    The index must hold at least as many walks per node as every iteration
    needs; building it for the smallest threshold the search can reach
    (``delta = 1/n``) guarantees that.
    """

    name = "fora-plus"

    def __init__(self, index: WalkIndex, backend=None):
        self.index = index
        self.backend = backend
        self._have = np.diff(index.offsets)

    def estimate(self, g: Graph, source: int, params: QueryParams) -> PprEstimate:
        meta = self.index.meta
        if (meta.n, meta.m) != (g.n, g.m) or meta.alpha != params.alpha:
            raise IndexMismatchError("index does not match the graph or alpha")
        r_max = choose_r_max(g, params)
        need = omega_max_all(g, params, r_max, meta.zero_hop)
        if np.any(need > self._have):
            raise IndexMismatchError(
                f"index too small for delta={params.delta:g}, eps={params.epsilon:g}, "
                f"p_f={params.p_f:g}"
            )
        state = forward_push(g, source, params.alpha, r_max, backend=self.backend)
        return finish(g, state, params, IndexWalker(self.index, self.backend), meta.zero_hop)


class McEstimator:
    name = "mc"

    def __init__(self, seed: int = 0, backend=None):
        self.seed = as_rng(seed).seed
        self.backend = backend

    def estimate(self, g: Graph, source: int, params: QueryParams) -> PprEstimate:
        return mc_whole_graph(g, source, params, self.seed, backend=self.backend)


def make_estimator(kind, seed: int = 0, index: WalkIndex | None = None, backend=None):
    if not isinstance(kind, str):
        return kind
    if kind == "fora":
        return ForaEstimator(seed, backend=backend)
    if kind == "fora-plus":
        if index is None:
            raise ValueError("fora-plus needs an index")
        return IndexEstimator(index, backend)
    if kind == "mc":
        return McEstimator(seed, backend)
    raise ValueError(f"unknown estimator {kind!r}")


# -- results and bounds -------------------------------------------------------

@dataclass
class TopKResult:
    entries: list
    delta_final: float
    iterations: int
    walks: int = 0
    pushes: int = 0
    certified: bool = True
    history: list = field(default_factory=list, repr=False)

    @property
    def nodes(self) -> list[int]:
        return [v for v, _ in self.entries]

    def summary(self) -> dict:
        return {
            "delta_final": self.delta_final,
            "iterations": self.iterations,
            "walks": self.walks,
            "pushes": self.pushes,
            "certified": self.certified,
        }


@dataclass
class BoundState:
    lb: np.ndarray
    ub: np.ndarray

    @classmethod
    def initial(cls, n: int) -> "BoundState":
        return cls(np.zeros(n), np.ones(n))

    def copy(self) -> "BoundState":
        return BoundState(self.lb.copy(), self.ub.copy())


def update_bounds(state: BoundState, reserve: np.ndarray, estimate: np.ndarray, r_sum: float,
                  omega: float, p_f_prime: float) -> BoundState:
    """Intersect the running bounds with this round's relative and absolute intervals.

    Relative width ``eps_j = sqrt(3 r_sum L / (omega * max(reserve, LB_prev)))`` and
    absolute width ``lambda_j`` solving
    ``omega*lam^2 - (2/3) r_sum L lam - 2 r_sum L UB_prev = 0``, with
    ``L = ln(2/p_f')``. A zero walk budget means the estimate is exact.
    """
    est = np.asarray(estimate, dtype=np.float64)
    if omega <= 0.0 or r_sum <= 0.0:
        eps_j = np.zeros_like(est)
        lam = np.zeros_like(est)
    else:
        L = math.log(2.0 / p_f_prime)
        base = np.maximum(reserve, state.lb)
        with np.errstate(divide="ignore", over="ignore"):
            eps_j = np.where(base > 0, np.sqrt(3.0 * r_sum * L / (omega * np.where(base > 0, base, 1.0))),
                             np.inf)
        lam = ((2.0 / 3.0) * r_sum * L
               + np.sqrt((4.0 / 9.0) * r_sum**2 * L**2 + 8.0 * r_sum * omega * L * state.ub)
               ) / (2.0 * omega)
    with np.errstate(divide="ignore", invalid="ignore"):
        ub_rel = np.where(eps_j < 1.0, est / np.where(eps_j < 1.0, 1.0 - eps_j, 1.0), 1.0)
        lb_rel = np.where(np.isinf(eps_j), 0.0, est / (1.0 + eps_j))
    ub = np.minimum.reduce([np.ones_like(est), ub_rel, est + lam, state.ub])
    lb = np.maximum.reduce([np.zeros_like(est), lb_rel, est - lam, state.lb])
    # an empty intersection means some earlier interval already failed
    lb = np.minimum(lb, ub)
    return BoundState(lb, ub)


# -- search loops ---------------------------------------------------------------

def delta_schedule(n: int, k: int):
    """1/k, 1/(2k), ... with the last value clamped to exactly 1/n."""
    floor = 1.0 / n
    d = 1.0 / k
    while d > floor:
        yield d
        d /= 2.0
    yield floor


def _ranked(scores: np.ndarray, k: int) -> np.ndarray:
    return np.lexsort((np.arange(scores.size), -scores))[:k]


def _entries(nodes, scores) -> list:
    nodes = np.asarray(nodes)
    order = np.lexsort((nodes, -scores[nodes]))
    return [(int(nodes[i]), float(scores[nodes[i]])) for i in order]


def _check_k(g: Graph, k: int) -> None:
    if not 1 <= k <= g.n:
        raise ValueError(f"k must be in [1, {g.n}], got {k}")


def fast_failure_prob(params: QueryParams, n: int, k: int) -> float:
    return params.p_f / (n * max(1.0, math.log2(n / k)))


def refine_failure_prob(params: QueryParams, n: int) -> float:
    return params.p_f / (n * max(1.0, math.log2(n)))


def topk_fast(g: Graph, estimator, source: int, k: int, params: QueryParams,
              rng=0, *, index: WalkIndex | None = None, backend=None) -> TopKResult:
    """Halve delta until the k-th largest estimate reaches ``(1 + eps) * delta``.

    Each round estimates with ``eps/2`` and ``p_f / (n log2(n/k))``; at
    ``delta = 1/n`` the current top-k is returned regardless.
    """
    _check_k(g, k)
    est_obj = make_estimator(estimator, as_rng(rng).seed, index, backend)
    pf = fast_failure_prob(params, g.n, k)
    eps = params.epsilon
    walks = pushes = it = 0
    for delta in delta_schedule(g.n, k):
        qp = QueryParams(params.alpha, eps / 2.0, delta, pf)
        est = est_obj.estimate(g, source, qp)
        it += 1
        walks += est.walks_issued
        pushes += est.pushes
        top = _ranked(est.scores, k)
        if est.scores[top[-1]] >= (1.0 + eps) * delta or delta == 1.0 / g.n:
            return TopKResult(_entries(top, est.scores), delta, it, walks, pushes, True)
    raise AssertionError("unreachable: schedule always ends at 1/n")


def topk_bound_refine(g: Graph, estimator, source: int, k: int, params: QueryParams,
                      rng=0, *, index: WalkIndex | None = None, backend=None,
                      record_bounds: bool = False) -> TopKResult:
    """Top-k with per-node confidence intervals refined as delta halves.

    Stops once the k largest lower bounds are tight, the k-th clears delta
    and no outsider could still belong to the top-k. If the schedule runs out
    first, the top-k by lower bound is returned with ``certified=False``.
    """
    _check_k(g, k)
    est_obj = make_estimator(estimator, as_rng(rng).seed, index, backend)
    pf = refine_failure_prob(params, g.n)
    eps = params.epsilon
    bounds = BoundState.initial(g.n)
    history = []
    walks = pushes = it = 0
    est = None
    cand = None
    delta = 1.0 / k
    for delta in delta_schedule(g.n, k):
        qp = QueryParams(params.alpha, eps, delta, pf)
        est = est_obj.estimate(g, source, qp)
        it += 1
        walks += est.walks_issued
        pushes += est.pushes
        bounds = update_bounds(bounds, est.reserve, est.scores, est.r_sum, est.omega, pf)
        if record_bounds:
            history.append(bounds.copy())
        cand = _ranked(bounds.lb, k)
        lb_k = bounds.lb[cand[-1]]
        if np.all(bounds.ub[cand] < (1.0 + eps) * bounds.lb[cand]) and lb_k >= delta:
            outside = np.ones(g.n, dtype=bool)
            outside[cand] = False
            u = outside & (bounds.ub > (1.0 + eps) * lb_k)
            if not np.any(u & (bounds.ub < (1.0 + eps) * bounds.lb / (1.0 - eps))):
                return TopKResult(_entries(cand, est.scores), delta, it, walks, pushes, True,
                                  history)
    return TopKResult(_entries(cand, est.scores), delta, it, walks, pushes, False, history)


def mc_topk(g: Graph, source: int, k: int, params: QueryParams, rng=0, *,
            backend=None) -> TopKResult:
    """The fast top-k loop driven by plain Monte-Carlo estimates."""
    return topk_fast(g, McEstimator(as_rng(rng).seed, backend), source, k, params)


def topk_index_params(g: Graph, params: QueryParams, k: int, method: str = "fast"
                      ) -> tuple[QueryParams, float]:
    """Parameters and threshold of the last round, for sizing a top-k index."""
    if method == "fast":
        qp = QueryParams(params.alpha, params.epsilon / 2.0, 1.0 / g.n,
                         fast_failure_prob(params, g.n, k))
    elif method == "refine":
        qp = QueryParams(params.alpha, params.epsilon, 1.0 / g.n, refine_failure_prob(params, g.n))
    else:
        raise ValueError(f"unknown top-k method {method!r}")
    return qp, choose_r_max(g, qp)
