"""Immutable directed graph in compressed out-adjacency form."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Directed multigraph stored as CSR out-adjacency.

    ``offsets[v]:offsets[v + 1]`` indexes the out-neighbors of ``v`` in
    ``targets``. Self-loops and parallel edges are kept.
    """

    offsets: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        offsets = np.ascontiguousarray(self.offsets, dtype=np.int64)
        targets = np.ascontiguousarray(self.targets, dtype=np.int64)
        if offsets.ndim != 1 or offsets.size < 1:
            raise ValueError("offsets must be a non-empty 1-d array")
        if offsets[0] != 0 or offsets[-1] != targets.size:
            raise ValueError("offsets must start at 0 and end at len(targets)")
        if np.any(np.diff(offsets) < 0):
            raise ValueError("offsets must be non-decreasing")
        n = offsets.size - 1
        if targets.size and (targets.min() < 0 or targets.max() >= n):
            raise ValueError("edge target out of range")
        offsets.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "_degree", np.diff(offsets))

    @property
    def n(self) -> int:
        return self.offsets.size - 1

    @property
    def m(self) -> int:
        return self.targets.size

    @property
    def out_degrees(self) -> np.ndarray:
        return self._degree

    def out_degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    def out_neighbors(self, v: int) -> np.ndarray:
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} out of range [0, {self.n})")
        return self.targets[self.offsets[v] : self.offsets[v + 1]]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.offsets, other.offsets) and np.array_equal(
            self.targets, other.targets
        )

    __hash__ = None

    @classmethod
    def from_edges(cls, src, dst, n: int | None = None) -> "Graph":
        """Build from parallel source/target arrays; edges are stably sorted by source."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if n is None:
            n = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("node id out of range")
        order = np.argsort(src, kind="stable")
        counts = np.bincount(src, minlength=n)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        return cls(offsets, dst[order])

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.out_degrees)
        return src, self.targets.copy()


def out_neighbors(g: Graph, v: int) -> np.ndarray:
    return g.out_neighbors(v)


def load_edge_list(path: str | os.PathLike, undirected: bool = False) -> Graph:
    """Read a whitespace-separated ``src dst`` edge list.

    Lines starting with ``#`` or ``%`` and blank lines are skipped. Node ids
    must be non-negative integers; ``n`` is the largest id plus one.
    """
    src: list[int] = []
    dst: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s[0] in "#%":
                continue
            parts = s.split()
            if len(parts) < 2:
                raise GraphFormatError(f"{path}:{lineno}: expected two node ids, got {s!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer node id in {s!r}") from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative node id in {s!r}")
            src.append(u)
            dst.append(v)
    if not src:
        raise GraphFormatError(f"{path}: no edges")
    s_arr = np.array(src, dtype=np.int64)
    d_arr = np.array(dst, dtype=np.int64)
    if undirected:
        s_arr, d_arr = np.concatenate([s_arr, d_arr]), np.concatenate([d_arr, s_arr])
    return Graph.from_edges(s_arr, d_arr)


def write_edge_list(g: Graph, path: str | os.PathLike) -> None:
    src, dst = g.edges()
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in zip(src.tolist(), dst.tolist()):
            fh.write(f"{u} {v}\n")


@dataclass(frozen=True)
class QueryParams:
    """Accuracy knobs: restart probability, relative error, threshold, failure probability."""

    alpha: float = 0.2
    epsilon: float = 0.5
    delta: float = 1e-3
    p_f: float = 1e-3

    def __post_init__(self):
        for name, lo, hi, hi_closed in (
            ("alpha", 0.0, 1.0, False),
            ("epsilon", 0.0, 1.0, False),
            ("delta", 0.0, 1.0, True),
            ("p_f", 0.0, 1.0, False),
        ):
            x = getattr(self, name)
            if not (isinstance(x, (int, float)) and math.isfinite(x)):
                raise ValueError(f"{name} must be a finite real, got {x!r}")
            ok = lo < x <= hi if hi_closed else lo < x < hi
            if not ok:
                bracket = "]" if hi_closed else ")"
                raise ValueError(f"{name}={x} outside ({lo}, {hi}{bracket}")

    @classmethod
    def for_graph(cls, g: Graph, alpha: float = 0.2, epsilon: float = 0.5) -> "QueryParams":
        """Defaults used throughout the experiments: delta = p_f = 1/n."""
        n = max(g.n, 2)
        return cls(alpha=alpha, epsilon=epsilon, delta=1.0 / n, p_f=1.0 / n)

    def replace(self, **kw) -> "QueryParams":
        d = dict(alpha=self.alpha, epsilon=self.epsilon, delta=self.delta, p_f=self.p_f)
        d.update(kw)
        return QueryParams(**d)

    @property
    def log_term(self) -> float:
        """(2*eps/3 + 2) * ln(2/p_f)."""
        return (2.0 * self.epsilon / 3.0 + 2.0) * math.log(2.0 / self.p_f)

    @property
    def walks_per_residue(self) -> float:
        """Walk count per unit of residue mass: omega = r_sum * this."""
        return self.log_term / (self.epsilon**2 * self.delta)
