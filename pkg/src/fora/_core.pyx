# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; mirror ``_pykernels`` exactly (same names, same results)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, uint32_t, uint8_t
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t NODE_MUL = 0xD1B54A32D192ED03ULL
cdef uint64_t WALK_MUL = 0xAEF17502108EF2D9ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _walk_key(uint64_t seed, uint64_t node, uint64_t walk) noexcept nogil:
    cdef uint64_t k = _mix64(seed + GOLDEN)
    k = _mix64(k ^ (node * NODE_MUL))
    return _mix64(k ^ (walk * WALK_MUL))


cdef inline uint64_t _draw(uint64_t key, uint64_t counter) noexcept nogil:
    return _mix64(key + (counter + 1) * GOLDEN)


cdef inline int64_t _walk(const int64_t[::1] offsets, const int64_t[::1] targets,
                          int64_t cur, double alpha, uint64_t key,
                          bint skip_zero_hop) noexcept nogil:
    cdef uint64_t c = 0
    cdef int64_t lo
    cdef uint64_t d, thr, x
    cdef double u
    if skip_zero_hop:
        lo = offsets[cur]
        d = <uint64_t>(offsets[cur + 1] - lo)
        if d == 0:
            return cur
        thr = (-d) % d
        while True:
            x = _draw(key, c)
            c += 1
            if x >= thr:
                break
        cur = targets[lo + <int64_t>(x % d)]
    while True:
        lo = offsets[cur]
        d = <uint64_t>(offsets[cur + 1] - lo)
        if d == 0:
            return cur
        u = <double>(_draw(key, c) >> 11) * INV_2_53
        c += 1
        if u < alpha:
            return cur
        thr = (-d) % d
        while True:
            x = _draw(key, c)
            c += 1
            if x >= thr:
                break
        cur = targets[lo + <int64_t>(x % d)]


def mix64(z):
    return _mix64(<uint64_t>(z & 0xFFFFFFFFFFFFFFFF))


def walk_key(seed, node, walk):
    return _walk_key(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF), <uint64_t>node, <uint64_t>walk)


def draw(key, counter):
    return _draw(<uint64_t>key, <uint64_t>counter)


def uniform01(key, counter):
    return <double>(_draw(<uint64_t>key, <uint64_t>counter) >> 11) * INV_2_53


def random_walk(const int64_t[::1] offsets, const int64_t[::1] targets, int64_t start,
                double alpha, seed, walk, bint skip_zero_hop):
    cdef uint64_t key = _walk_key(<uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF),
                                  <uint64_t>start, <uint64_t>walk)
    return _walk(offsets, targets, start, alpha, key, skip_zero_hop)


cdef inline bint _active(const int64_t[::1] offsets, double[::1] res, int64_t v,
                         double r_max) noexcept nogil:
    cdef int64_t d = offsets[v + 1] - offsets[v]
    if d > 0:
        return res[v] > r_max * d
    return res[v] > 0.0


def push(const int64_t[::1] offsets, const int64_t[::1] targets, double[::1] reserve,
         double[::1] residue, const int64_t[::1] candidates, double alpha, double r_max,
         double r_sum, double budget_coef, int64_t max_pushes):
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t size = n + 1
    cdef Py_ssize_t head = 0, tail = 0, i
    cdef int64_t v, u, lo, d, e, cost = 0, pushes = 0
    cdef double r, inc, one_minus = 1.0 - alpha
    cdef uint8_t* inq = <uint8_t*>malloc(n * sizeof(uint8_t) + 1)
    cdef int64_t* queue = <int64_t*>malloc(size * sizeof(int64_t))
    if inq == NULL or queue == NULL:
        free(inq)
        free(queue)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                inq[i] = 0
            for i in range(candidates.shape[0]):
                v = candidates[i]
                if not inq[v] and _active(offsets, residue, v, r_max):
                    queue[tail] = v
                    tail = (tail + 1) % size
                    inq[v] = 1
            while head != tail:
                if max_pushes >= 0 and pushes >= max_pushes:
                    break
                if budget_coef >= 0.0 and <double>cost >= r_sum * budget_coef:
                    break
                v = queue[head]
                head = (head + 1) % size
                inq[v] = 0
                r = residue[v]
                lo = offsets[v]
                d = offsets[v + 1] - lo
                if d == 0:
                    if not r > 0.0:
                        continue
                    reserve[v] += r
                    residue[v] = 0.0
                    r_sum -= r
                    cost += 1
                else:
                    if not r > r_max * d:
                        continue
                    reserve[v] += alpha * r
                    residue[v] = 0.0
                    inc = one_minus * r / d
                    for e in range(lo, lo + d):
                        u = targets[e]
                        residue[u] += inc
                        if not inq[u] and _active(offsets, residue, u, r_max):
                            queue[tail] = u
                            tail = (tail + 1) % size
                            inq[u] = 1
                    r_sum -= alpha * r
                    cost += d
                pushes += 1
    finally:
        free(inq)
        free(queue)
    return cost, pushes, r_sum


def walk_phase(const int64_t[::1] offsets, const int64_t[::1] targets,
               const int64_t[::1] nodes, const int64_t[::1] counts, const double[::1] incs,
               double alpha, seed, bint skip_zero_hop, double[::1] scores):
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    cdef int64_t j, v, cnt, t, total = 0
    cdef double inc
    with nogil:
        for i in range(nodes.shape[0]):
            v = nodes[i]
            cnt = counts[i]
            inc = incs[i]
            for j in range(cnt):
                t = _walk(offsets, targets, v, alpha, _walk_key(s, <uint64_t>v, <uint64_t>j),
                          skip_zero_hop)
                scores[t] += inc
            total += cnt
    return total


def index_phase(const int64_t[::1] idx_offsets, const uint32_t[::1] destinations,
                const int64_t[::1] nodes, const int64_t[::1] counts, const double[::1] incs,
                double[::1] scores):
    cdef Py_ssize_t i
    cdef int64_t j, v, lo, cnt, total = 0
    cdef double inc
    for i in range(nodes.shape[0]):
        v = nodes[i]
        lo = idx_offsets[v]
        cnt = counts[i]
        if cnt > idx_offsets[v + 1] - lo:
            raise RuntimeError(f"index slice for node {v} shorter than {cnt}")
        inc = incs[i]
        for j in range(lo, lo + cnt):
            scores[destinations[j]] += inc
        total += cnt
    return total


def build_walks(const int64_t[::1] offsets, const int64_t[::1] targets,
                const int64_t[::1] counts, double alpha, seed, bint skip_zero_hop,
                uint32_t[::1] out):
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t v
    cdef int64_t j, pos = 0
    with nogil:
        for v in range(counts.shape[0]):
            for j in range(counts[v]):
                out[pos] = <uint32_t>_walk(offsets, targets, v, alpha,
                                           _walk_key(s, <uint64_t>v, <uint64_t>j), skip_zero_hop)
                pos += 1
    return pos
