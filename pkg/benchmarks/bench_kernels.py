"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --n 2000 --m 20000 --sources 5
"""

import argparse
import time

import numpy as np

from fora import _kernels
from fora.generate import erdos_renyi
from fora.graph import QueryParams
from fora.index import build_index
from fora.push import forward_push
from fora.query import choose_r_max, whole_graph_basic


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--m", type=int, default=20000)
    ap.add_argument("--sources", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = erdos_renyi(args.n, args.m, args.seed)
    params = QueryParams.for_graph(g)
    r_max = choose_r_max(g, params)
    sources = np.random.default_rng(args.seed).choice(g.n, args.sources, replace=False).tolist()
    backends = _kernels.available()

    cases = {
        "push": lambda b: [forward_push(g, s, params.alpha, r_max, backend=b).cost for s in sources],
        "query": lambda b: [whole_graph_basic(g, s, params, rng=args.seed, backend=b).scores
                            for s in sources],
        "build-index": lambda b: build_index(g, params, r_max, args.seed, backend=b).destinations,
    }
    print(f"graph n={g.n} m={g.m}, {len(sources)} sources, best of {args.repeat}")
    print(f"{'kernel':<12}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases.items():
        times, outs = [], []
        for b in backends:
            t, out = timed(lambda: fn(b), args.repeat)
            times.append(t)
            outs.append(out)
        if len(outs) == 2:
            a, c = outs
            same = all(np.array_equal(x, y) for x, y in zip(a, c)) if isinstance(a, list) \
                else np.array_equal(a, c)
            if not same:
                raise SystemExit(f"{name}: backends disagree")
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{name:<12}" + "".join(f"{t:>11.4f}s" for t in times) + speed)


if __name__ == "__main__":
    main()
