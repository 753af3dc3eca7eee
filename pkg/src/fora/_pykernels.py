"""Pure-Python kernels. Semantics are the reference for ``_core.pyx``.

Every function here has a compiled twin with the same name and signature;
both must produce bit-identical results for the same inputs.
"""

M64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
NODE_MUL = 0xD1B54A32D192ED03
WALK_MUL = 0xAEF17502108EF2D9
INV_2_53 = 1.0 / 9007199254740992.0

BACKEND = "python"


def mix64(z):
    z &= M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def walk_key(seed, node, walk):
    k = mix64((seed + GOLDEN) & M64)
    k = mix64(k ^ ((node * NODE_MUL) & M64))
    return mix64(k ^ ((walk * WALK_MUL) & M64))


def draw(key, counter):
    return mix64((key + (counter + 1) * GOLDEN) & M64)


def _walk(offsets, targets, cur, alpha, key, skip_zero_hop):
    c = 0
    if skip_zero_hop:
        lo = offsets[cur]
        d = int(offsets[cur + 1] - lo)
        if d == 0:
            return cur
        thr = ((1 << 64) - d) % d
        while True:
            x = draw(key, c)
            c += 1
            if x >= thr:
                break
        cur = targets[lo + x % d]
    while True:
        lo = offsets[cur]
        d = int(offsets[cur + 1] - lo)
        if d == 0:
            return cur
        u = (draw(key, c) >> 11) * INV_2_53
        c += 1
        if u < alpha:
            return cur
        thr = ((1 << 64) - d) % d
        while True:
            x = draw(key, c)
            c += 1
            if x >= thr:
                break
        cur = targets[lo + x % d]


def random_walk(offsets, targets, start, alpha, seed, walk, skip_zero_hop):
    return _walk(
        offsets, targets, int(start), float(alpha), walk_key(int(seed) & M64, int(start), int(walk)),
        bool(skip_zero_hop),
    )


def push(offsets, targets, reserve, residue, candidates, alpha, r_max, r_sum,
         budget_coef, max_pushes):
    """FIFO forward push, in place on ``reserve``/``residue``.

    A non-dangling node is active when residue > r_max * degree; a dangling
    node is active whenever its residue is positive and is absorbed whole.
    ``budget_coef < 0`` disables the cost budget; otherwise pushing stops
    once accumulated edge cost reaches ``r_sum * budget_coef``. Returns
    ``(cost, pushes, r_sum)`` with ``r_sum`` tracked incrementally.
    """
    offs = offsets.tolist()
    tg = targets.tolist()
    res = residue.tolist()
    rsv = reserve.tolist()
    n = len(offs) - 1
    inq = [False] * n
    queue = [0] * (n + 1)
    head = tail = 0
    size = n + 1
    for v in candidates.tolist():
        d = offs[v + 1] - offs[v]
        if not inq[v] and (res[v] > r_max * d if d > 0 else res[v] > 0.0):
            queue[tail] = v
            tail = (tail + 1) % size
            inq[v] = True
    cost = 0
    pushes = 0
    one_minus = 1.0 - alpha
    while head != tail:
        if max_pushes >= 0 and pushes >= max_pushes:
            break
        if budget_coef >= 0.0 and cost >= r_sum * budget_coef:
            break
        v = queue[head]
        head = (head + 1) % size
        inq[v] = False
        r = res[v]
        lo = offs[v]
        d = offs[v + 1] - lo
        if d == 0:
            if not r > 0.0:
                continue
            rsv[v] += r
            res[v] = 0.0
            r_sum -= r
            cost += 1
        else:
            if not r > r_max * d:
                continue
            rsv[v] += alpha * r
            res[v] = 0.0
            inc = one_minus * r / d
            for e in range(lo, lo + d):
                u = tg[e]
                res[u] += inc
                if not inq[u]:
                    du = offs[u + 1] - offs[u]
                    if res[u] > r_max * du if du > 0 else res[u] > 0.0:
                        queue[tail] = u
                        tail = (tail + 1) % size
                        inq[u] = True
            r_sum -= alpha * r
            cost += d
        pushes += 1
    residue[:] = res
    reserve[:] = rsv
    return cost, pushes, r_sum


def walk_phase(offsets, targets, nodes, counts, incs, alpha, seed, skip_zero_hop, scores):
    """Run ``counts[i]`` keyed walks from ``nodes[i]``, adding ``incs[i]`` per terminal."""
    offs = offsets.tolist()
    tg = targets.tolist()
    sc = scores.tolist()
    seed = int(seed) & M64
    alpha = float(alpha)
    total = 0
    for v, cnt, inc in zip(nodes.tolist(), counts.tolist(), incs.tolist()):
        for j in range(cnt):
            t = _walk(offs, tg, v, alpha, walk_key(seed, v, j), skip_zero_hop)
            sc[t] += inc
        total += cnt
    scores[:] = sc
    return total


def index_phase(idx_offsets, destinations, nodes, counts, incs, scores):
    """Same accumulation as ``walk_phase`` but terminals come from index prefixes."""
    io = idx_offsets.tolist()
    sc = scores.tolist()
    total = 0
    for v, cnt, inc in zip(nodes.tolist(), counts.tolist(), incs.tolist()):
        lo = io[v]
        if cnt > io[v + 1] - lo:
            raise RuntimeError(f"index slice for node {v} shorter than {cnt}")
        for t in destinations[lo : lo + cnt].tolist():
            sc[t] += inc
        total += cnt
    scores[:] = sc
    return total


def build_walks(offsets, targets, counts, alpha, seed, skip_zero_hop, out):
    """Fill ``out`` with ``counts[v]`` keyed walk terminals per node, node-major."""
    offs = offsets.tolist()
    tg = targets.tolist()
    seed = int(seed) & M64
    alpha = float(alpha)
    pos = 0
    buf = []
    for v, cnt in enumerate(counts.tolist()):
        for j in range(cnt):
            buf.append(_walk(offs, tg, v, alpha, walk_key(seed, v, j), skip_zero_hop))
        pos += cnt
    out[:pos] = buf
    return pos


def uniform01(key, counter):
    return (draw(key, counter) >> 11) * INV_2_53


__all__ = [
    "BACKEND", "mix64", "walk_key", "draw", "random_walk", "push", "walk_phase",
    "index_phase", "build_walks", "uniform01",
]
