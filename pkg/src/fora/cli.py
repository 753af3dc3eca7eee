"""Command-line front end.

Exit codes: 0 ok, 2 usage, 3 I/O, 4 bad file format or incompatible index,
5 internal invariant violated.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels
from .exact import audit_relative_error, ndcg_at_k, power_iteration, precision_at_k
from .generate import KINDS, generate
from .graph import GraphFormatError, QueryParams, load_edge_list, write_edge_list
from .index import (
    IndexFormatError,
    IndexMismatchError,
    build_index,
    load_index,
    query_with_index,
    save_index,
)
from .mc import mc_whole_graph
from .query import choose_r_max, global_pagerank, whole_graph_balanced, whole_graph_basic
from .topk import mc_topk, topk_bound_refine, topk_fast, topk_index_params

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_FORMAT, EXIT_INTERNAL = 0, 2, 3, 4, 5

WHOLE_METHODS = ("fora", "fora-basic", "fora-plus", "mc")
TOPK_METHODS = ("fora", "fora-plus", "mc", "mc-topk", "topk-fast", "topk-refine")


class UsageError(Exception):
    pass


# -- shared plumbing --------------------------------------------------------------

def _params(args, g) -> QueryParams:
    base = QueryParams.for_graph(g, alpha=args.alpha, epsilon=args.epsilon)
    kw = {}
    if args.delta is not None:
        kw["delta"] = args.delta
    if args.pf is not None:
        kw["p_f"] = args.pf
    return base.replace(**kw) if kw else base


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write_scores(path, scores: np.ndarray, limit: int | None = None) -> None:
    order = np.lexsort((np.arange(scores.size), -scores))
    if limit is not None:
        order = order[:limit]
    with _open_out(path) as fh:
        for v in order.tolist():
            fh.write(f"{v}\t{float(scores[v])!r}\n")


def _check_source(g, source: int) -> None:
    if not 0 <= source < g.n:
        raise UsageError(f"source {source} out of range [0, {g.n})")


def _r_max(args, g, params) -> float:
    return choose_r_max(g, params) * args.rmax_scale


def _whole_graph(method, g, source, params, args, idx=None):
    if method == "fora":
        return whole_graph_balanced(g, source, params, args.seed, backend=args.backend)
    if method == "fora-basic":
        return whole_graph_basic(g, source, params, _r_max(args, g, params), args.seed,
                                 backend=args.backend)
    if method == "mc":
        return mc_whole_graph(g, source, params, args.seed, backend=args.backend)
    if method == "fora-plus":
        if idx is None:
            raise UsageError("method fora-plus needs --index")
        return query_with_index(g, idx, source, params, backend=args.backend)
    raise UsageError(f"unknown method {method!r}")


def _topk(method, g, source, k, params, args, idx=None):
    if not 1 <= k <= g.n:
        raise UsageError(f"k must be in [1, {g.n}]")
    refine = args.algorithm == "refine" or method == "topk-refine"
    run = topk_bound_refine if refine else topk_fast
    if method in ("mc", "mc-topk"):
        if refine:
            return topk_bound_refine(g, "mc", source, k, params, args.seed, backend=args.backend)
        return mc_topk(g, source, k, params, args.seed, backend=args.backend)
    if method in ("fora", "topk-fast", "topk-refine"):
        return run(g, "fora", source, k, params, args.seed, backend=args.backend)
    if method == "fora-plus":
        if idx is None:
            raise UsageError("method fora-plus needs --index")
        return run(g, "fora-plus", source, k, params, index=idx, backend=args.backend)
    raise UsageError(f"unknown method {method!r}")


def _load_index(args):
    return load_index(args.index) if getattr(args, "index", None) else None


def _sources(g, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.choice(g.n, size=count, replace=count > g.n)


def _k_menu(n: int) -> list[int]:
    menu = [10, 20, 30, 40, 50] if n <= 2000 else [100, 200, 300, 400, 500]
    return [k for k in menu if k <= n] or [n]


# -- commands ---------------------------------------------------------------------

def cmd_generate(args) -> int:
    g = generate(args.kind, args.n, args.m, args.seed)
    if args.out in (None, "-"):
        src, dst = g.edges()
        for u, v in zip(src.tolist(), dst.tolist()):
            sys.stdout.write(f"{u} {v}\n")
    else:
        write_edge_list(g, args.out)
    return EXIT_OK


def cmd_query(args) -> int:
    g = load_edge_list(args.graph, args.undirected)
    _check_source(g, args.source)
    params = _params(args, g)
    est = _whole_graph(args.method, g, args.source, params, args, _load_index(args))
    _write_scores(args.out, est.scores, args.top)
    return EXIT_OK


def cmd_pagerank(args) -> int:
    g = load_edge_list(args.graph, args.undirected)
    params = _params(args, g)
    est = global_pagerank(g, params, args.seed, _r_max(args, g, params), backend=args.backend)
    _write_scores(args.out, est.scores, args.top)
    return EXIT_OK


def cmd_topk(args) -> int:
    g = load_edge_list(args.graph, args.undirected)
    _check_source(g, args.source)
    params = _params(args, g)
    res = _topk(args.method, g, args.source, args.k, params, args, _load_index(args))
    with _open_out(args.out) as fh:
        for v, s in res.entries:
            fh.write(f"{v}\t{s!r}\n")
    summary = json.dumps(res.summary(), sort_keys=True)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(summary + "\n")
    elif args.out not in (None, "-"):
        with open(str(args.out) + ".json", "w", encoding="utf-8") as fh:
            fh.write(summary + "\n")
    else:
        sys.stderr.write(summary + "\n")
    return EXIT_OK


def cmd_build_index(args) -> int:
    if args.out in (None, "-"):
        raise UsageError("build-index needs --out")
    g = load_edge_list(args.graph, args.undirected)
    params = _params(args, g)
    if args.k is not None:
        if not 1 <= args.k <= g.n:
            raise UsageError(f"k must be in [1, {g.n}]")
        params, r_max = topk_index_params(g, params, args.k, args.algorithm)
    else:
        r_max = choose_r_max(g, params)
    idx = build_index(g, params, r_max * args.rmax_scale, args.seed, args.zero_hop,
                      backend=args.backend)
    save_index(idx, args.out)
    sys.stderr.write(f"index: {idx.size} destinations, r_max={idx.meta.r_max!r}\n")
    return EXIT_OK


EVAL_FIELDS = ["query_id", "source", "method", "k", "precision", "ndcg", "violations",
               "eligible", "violation_fraction", "walks", "pushes"]


def _eval_one(qid, source, g, params, args, idx):
    exact = power_iteration(g, int(source), params.alpha, args.iters, args.tol)
    rows = []
    ks = args.k or _k_menu(g.n)
    if args.method in WHOLE_METHODS and not args.topk:
        est = _whole_graph(args.method, g, int(source), params, args, idx)
        rep = audit_relative_error(est, exact, params)
        for k in ks:
            nodes = [v for v, _ in est.top(k)]
            rows.append([qid, int(source), args.method, k, precision_at_k(nodes, exact, k),
                         ndcg_at_k(nodes, exact, k), rep.count, rep.eligible, rep.fraction,
                         est.walks_issued, est.pushes])
        return rows
    for k in ks:
        res = _topk(args.method, g, int(source), k, params, args, idx)
        nodes = res.nodes
        est = np.array([s for _, s in res.entries])
        pi = exact.scores[np.asarray(nodes)]
        eligible = pi > res.delta_final
        bad = int(np.sum(eligible & (np.abs(pi - est) > params.epsilon * pi)))
        n_el = int(eligible.sum())
        rows.append([qid, int(source), args.method, k, precision_at_k(nodes, exact, k),
                     ndcg_at_k(nodes, exact, k), bad, n_el, bad / n_el if n_el else 0.0,
                     res.walks, res.pushes])
    return rows


def cmd_eval(args) -> int:
    g = load_edge_list(args.graph, args.undirected)
    params = _params(args, g)
    idx = _load_index(args)
    for k in args.k or []:
        if not 1 <= k <= g.n:
            raise UsageError(f"k must be in [1, {g.n}]")
    sources = _sources(g, args.sources, args.seed)
    jobs = list(enumerate(sources.tolist()))
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(lambda j: _eval_one(j[0], j[1], g, params, args, idx), jobs))
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVAL_FIELDS)
        for rows in results:
            w.writerows(rows)
    return EXIT_OK


BENCH_FIELDS = ["method", "backend", "queries", "seconds", "seconds_per_query", "walks", "pushes"]


def cmd_bench(args) -> int:
    g = load_edge_list(args.graph, args.undirected)
    params = _params(args, g)
    idx = _load_index(args)
    sources = _sources(g, args.sources, args.seed).tolist()
    methods = args.methods or ["fora", "fora-basic", "mc"] + (["fora-plus"] if idx else [])
    backends = args.backends or _kernels.available()
    rows = []
    for method in methods:
        for backend in backends:
            args.backend = backend
            walks = pushes = 0
            t0 = time.perf_counter()
            for s in sources:
                if method in WHOLE_METHODS:
                    est = _whole_graph(method, g, s, params, args, idx)
                    walks += est.walks_issued
                    pushes += est.pushes
                else:
                    res = _topk(method, g, s, args.k, params, args, idx)
                    walks += res.walks
                    pushes += res.pushes
            dt = time.perf_counter() - t0
            rows.append([method, backend, len(sources), f"{dt:.6f}",
                         f"{dt / max(len(sources), 1):.6f}", walks, pushes])
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_FIELDS)
        w.writerows(rows)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def _add_common(p, graph=True):
    if graph:
        p.add_argument("--graph", required=True, help="edge-list file")
        p.add_argument("--undirected", action="store_true", help="add both directions of every edge")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=None, help="default 1/n")
    p.add_argument("--pf", type=float, default=None, help="default 1/n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rmax-scale", type=float, default=1.0)
    p.add_argument("--backend", choices=["python", "cython"], default=None)
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fora", description="Approximate personalized PageRank.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic edge list")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="edges (erdos-renyi) or degree (ba)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("query", help="whole-graph PPR from one source")
    _add_common(p)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--method", choices=WHOLE_METHODS, default="fora")
    p.add_argument("--index", default=None)
    p.add_argument("--top", type=int, default=None, help="only write the highest N scores")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("pagerank", help="global PageRank via the uniform source distribution")
    _add_common(p)
    p.add_argument("--top", type=int, default=None)
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("topk", help="approximate top-k PPR")
    _add_common(p)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=TOPK_METHODS, default="fora")
    p.add_argument("--algorithm", choices=["fast", "refine"], default="fast")
    p.add_argument("--index", default=None)
    p.add_argument("--summary", default=None, help="JSON summary path (default OUT.json)")
    p.set_defaults(func=cmd_topk)

    p = sub.add_parser("build-index", help="precompute walk destinations")
    _add_common(p)
    p.add_argument("--zero-hop", action="store_true")
    p.add_argument("--k", type=int, default=None, help="size the index for top-k queries")
    p.add_argument("--algorithm", choices=["fast", "refine"], default="fast")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("eval", help="accuracy against power iteration, CSV per query")
    _add_common(p)
    p.add_argument("--method", choices=sorted(set(WHOLE_METHODS + TOPK_METHODS)), default="fora")
    p.add_argument("--topk", action="store_true",
                   help="run the top-k search instead of a whole-graph query")
    p.add_argument("--algorithm", choices=["fast", "refine"], default="fast")
    p.add_argument("--sources", type=int, default=50)
    p.add_argument("--k", type=int, nargs="+", default=None)
    p.add_argument("--index", default=None)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="timing and walk counts across methods and backends")
    _add_common(p)
    p.add_argument("--methods", nargs="+", default=None,
                   choices=sorted(set(WHOLE_METHODS + TOPK_METHODS)))
    p.add_argument("--backends", nargs="+", choices=["python", "cython"], default=None)
    p.add_argument("--sources", type=int, default=10)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--algorithm", choices=["fast", "refine"], default="fast")
    p.add_argument("--index", default=None)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"fora: error: {exc}", file=sys.stderr)
        return EXIT_FORMAT if isinstance(exc, GraphFormatError) else EXIT_USAGE
    except (IndexFormatError, IndexMismatchError) as exc:
        print(f"fora: error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"fora: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RuntimeError, AssertionError) as exc:
        print(f"fora: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
