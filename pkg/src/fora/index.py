"""Precomputed random-walk destinations per node, and queries that consume them.

Binary layout (little-endian)::

    b"FORAIDX1"  u32 version
    u64 n  u64 m  f64 alpha  f64 epsilon  f64 delta  f64 p_f  f64 r_max
    u64 seed  u8 zero_hop
    (n+1) x u64 offsets
    offsets[n] x u32 destinations
    u32 crc32 of every preceding byte
"""

from __future__ import annotations

import math
import os
import struct
import zlib
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .graph import Graph, QueryParams
from .push import forward_push
from .query import PprEstimate, choose_r_max, finish, walk_count
from .walks import M64

MAGIC = b"FORAIDX1"
VERSION = 1
_HEADER = struct.Struct("<8sIQQdddddQB")


class WalkIndexError(Exception):
    """Base class for index problems."""


class IndexFormatError(WalkIndexError):
    """File is not a readable index: bad magic, version, truncation or checksum."""


class IndexMismatchError(WalkIndexError):
    """Index was built for a different graph or different parameters."""


@dataclass(frozen=True)
class IndexMeta:
    n: int
    m: int
    alpha: float
    epsilon: float
    delta: float
    p_f: float
    r_max: float
    seed: int
    zero_hop: bool

    @property
    def params(self) -> QueryParams:
        return QueryParams(self.alpha, self.epsilon, self.delta, self.p_f)


@dataclass(eq=False)
class WalkIndex:
    meta: IndexMeta
    offsets: np.ndarray
    destinations: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, WalkIndex):
            return NotImplemented
        return (
            self.meta == other.meta
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.destinations, other.destinations)
        )

    __hash__ = None

    @property
    def size(self) -> int:
        return int(self.destinations.size)

    def slice(self, v: int) -> np.ndarray:
        return self.destinations[self.offsets[v] : self.offsets[v + 1]]

    def to_bytes(self) -> bytes:
        m = self.meta
        parts = [
            _HEADER.pack(MAGIC, VERSION, m.n, m.m, m.alpha, m.epsilon, m.delta, m.p_f,
                         m.r_max, m.seed, int(m.zero_hop)),
            self.offsets.astype("<u8").tobytes(),
            self.destinations.astype("<u4").tobytes(),
        ]
        body = b"".join(parts)
        return body + struct.pack("<I", zlib.crc32(body))


def _cap(g: Graph, params: QueryParams, r_max: float, zero_hop: bool) -> np.ndarray:
    # same float expression order as the query side, so the prefix check is exact
    cap = g.out_degrees.astype(np.float64) * r_max
    if zero_hop:
        cap = (1.0 - params.alpha) * cap
    return cap * params.walks_per_residue


def omega_max_all(g: Graph, params: QueryParams, r_max: float, zero_hop: bool = False
                  ) -> np.ndarray:
    return np.fromiter((walk_count(x) for x in _cap(g, params, r_max, zero_hop).tolist()),
                       dtype=np.int64, count=g.n)


def omega_max(g: Graph, v: int, params: QueryParams, r_max: float, zero_hop: bool = False) -> int:
    """Most walks any query with threshold ``r_max`` can need from ``v``.

    ``ceil(deg(v) * r_max * walks_per_residue)``, scaled by ``1 - alpha`` for
    zero-hop indexes.
    """
    return int(walk_count(float(_cap(g, params, r_max, zero_hop)[v])))


def size_bound(g: Graph, params: QueryParams) -> float:
    """Upper bound on total destinations for an index at the default threshold, plus n slack."""
    eps, delta = params.epsilon, params.delta
    a = g.n + math.sqrt(g.m) / (eps * math.sqrt(delta)) * math.sqrt(params.log_term)
    return min(a, g.m) + g.n


def build_index(g: Graph, params: QueryParams, r_max: float | None = None, seed: int = 0,
                zero_hop: bool = False, *, backend=None) -> WalkIndex:
    if r_max is None:
        r_max = choose_r_max(g, params)
    if g.n >= 2**32:
        raise ValueError("index format stores node ids as u32")
    counts = omega_max_all(g, params, r_max, zero_hop)
    offsets = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    dest = np.zeros(int(offsets[-1]), dtype=np.uint32)
    k = _kernels.get(backend)
    k.build_walks(g.offsets, g.targets, counts, float(params.alpha), int(seed) & M64,
                  bool(zero_hop), dest)
    meta = IndexMeta(g.n, g.m, params.alpha, params.epsilon, params.delta, params.p_f,
                     float(r_max), int(seed) & M64, bool(zero_hop))
    return WalkIndex(meta, offsets, dest)


class IndexWalker:
    """Reads walk terminals from index prefixes instead of simulating them."""

    def __init__(self, idx: WalkIndex, backend=None):
        self.idx = idx
        self.backend = backend

    def run(self, g, scores, nodes, counts, incs, alpha, zero_hop) -> int:
        if bool(zero_hop) != self.idx.meta.zero_hop:
            raise IndexMismatchError("zero-hop mode differs from the index")
        k = _kernels.get(self.backend)
        return int(k.index_phase(self.idx.offsets, self.idx.destinations, nodes, counts, incs,
                                 scores))


def check_compatible(g: Graph, idx: WalkIndex, params: QueryParams | None = None) -> None:
    m = idx.meta
    if (m.n, m.m) != (g.n, g.m):
        raise IndexMismatchError(f"index is for n={m.n}, m={m.m}; graph has n={g.n}, m={g.m}")
    if params is None:
        return
    want = asdict(m.params)
    got = asdict(params)
    diff = [k for k in want if want[k] != got[k]]
    if diff:
        raise IndexMismatchError("index built with different " + ", ".join(diff))


def query_with_index(g: Graph, idx: WalkIndex, source: int, params: QueryParams | None = None,
                     *, backend=None) -> PprEstimate:
    """Whole-graph query whose walk phase reads index prefixes.

    Bit-identical to the online query with ``r_max = idx.meta.r_max`` and
    ``seed = idx.meta.seed`` (basic or zero-hop per ``idx.meta.zero_hop``).
    """
    if params is None:
        params = idx.meta.params
    check_compatible(g, idx, params)
    state = forward_push(g, source, params.alpha, idx.meta.r_max, backend=backend)
    return finish(g, state, params, IndexWalker(idx, backend), zero_hop=idx.meta.zero_hop)


def save_index(idx: WalkIndex, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(idx.to_bytes())


def index_from_bytes(buf: bytes) -> WalkIndex:
    if len(buf) < 8 or buf[:8] != MAGIC:
        raise IndexFormatError("bad magic")
    if len(buf) < _HEADER.size + 4:
        raise IndexFormatError("truncated header")
    (_, version, n, m, alpha, eps, delta, p_f, r_max, seed, zh) = _HEADER.unpack_from(buf, 0)
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    pos = _HEADER.size
    off_end = pos + 8 * (n + 1)
    if len(buf) < off_end + 4:
        raise IndexFormatError("truncated offsets")
    offsets = np.frombuffer(buf, dtype="<u8", count=n + 1, offset=pos).astype(np.int64)
    total = int(offsets[-1])
    end = off_end + 4 * total
    if len(buf) != end + 4:
        raise IndexFormatError(f"expected {end + 4} bytes, got {len(buf)}")
    (crc,) = struct.unpack_from("<I", buf, end)
    if zlib.crc32(buf[:end]) != crc:
        raise IndexFormatError("checksum mismatch")
    if offsets[0] != 0 or np.any(np.diff(offsets) < 0):
        raise IndexFormatError("malformed offsets")
    dest = np.frombuffer(buf, dtype="<u4", count=total, offset=off_end).astype(np.uint32)
    if total and int(dest.max()) >= n:
        raise IndexFormatError("destination out of range")
    meta = IndexMeta(n, m, alpha, eps, delta, p_f, r_max, seed, bool(zh))
    return WalkIndex(meta, offsets, dest)


def load_index(path: str | os.PathLike) -> WalkIndex:
    with open(path, "rb") as fh:
        return index_from_bytes(fh.read())
