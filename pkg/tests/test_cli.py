import csv
import json

import pytest

from fora.cli import main
from fora.generate import ba_preferential, erdos_renyi, generate


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def graph_file(tmp_path):
    p = tmp_path / "g.txt"
    assert run("generate", "--kind", "erdos-renyi", "--n", 300, "--m", 1500, "--seed", 2,
               "--out", p) == 0
    return p


def test_generate_exact_text(tmp_path):
    run("generate", "--kind", "cycle", "--n", 2, "--out", tmp_path / "c.txt")
    assert (tmp_path / "c.txt").read_text() == "0 1\n1 0\n"
    run("generate", "--kind", "star", "--n", 4, "--out", tmp_path / "s.txt")
    assert (tmp_path / "s.txt").read_text() == "0 1\n0 2\n0 3\n"


def test_generate_deterministic(tmp_path):
    for name in ("a", "b"):
        run("generate", "--kind", "erdos-renyi", "--n", 100, "--m", 400, "--seed", 5,
            "--out", tmp_path / name)
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_generators_shape():
    g = erdos_renyi(50, 200, 1)
    src, dst = g.edges()
    assert g.m == 200 and not (src == dst).any()
    assert len(set(zip(src.tolist(), dst.tolist()))) == 200
    b = ba_preferential(100, 2, 0)
    assert b.m == 2 * 2 * 98
    with pytest.raises(ValueError):
        generate("rmat", 10)


def test_query_byte_identical(tmp_path, graph_file):
    for name in ("a.tsv", "b.tsv"):
        assert run("query", "--graph", graph_file, "--source", 0, "--seed", 1,
                   "--out", tmp_path / name) == 0
    a = (tmp_path / "a.tsv").read_text()
    assert a == (tmp_path / "b.tsv").read_text()
    rows = [line.split("\t") for line in a.splitlines()]
    assert len(rows) == 300
    scores = [float(s) for _, s in rows]
    assert scores == sorted(scores, reverse=True)
    assert abs(sum(scores) - 1) < 1e-9


def test_index_topk_matches_online(tmp_path, graph_file):
    idx = tmp_path / "g.idx"
    assert run("build-index", "--graph", graph_file, "--k", 10, "--seed", 4, "--out", idx) == 0
    assert run("topk", "--graph", graph_file, "--source", 3, "--k", 10, "--seed", 4,
               "--method", "fora", "--out", tmp_path / "on.tsv") == 0
    assert run("topk", "--graph", graph_file, "--source", 3, "--k", 10, "--method", "fora-plus",
               "--index", idx, "--out", tmp_path / "ix.tsv") == 0
    assert (tmp_path / "on.tsv").read_text() == (tmp_path / "ix.tsv").read_text()
    summary = json.loads((tmp_path / "on.tsv.json").read_text())
    assert set(summary) == {"delta_final", "iterations", "walks", "pushes", "certified"}


def test_whole_graph_index_query(tmp_path, graph_file):
    idx = tmp_path / "w.idx"
    run("build-index", "--graph", graph_file, "--seed", 9, "--rmax-scale", 3, "--out", idx)
    run("query", "--graph", graph_file, "--source", 1, "--method", "fora-plus", "--index", idx,
        "--out", tmp_path / "ix.tsv")
    run("query", "--graph", graph_file, "--source", 1, "--method", "fora-basic", "--seed", 9,
        "--rmax-scale", 3, "--out", tmp_path / "on.tsv")
    assert (tmp_path / "on.tsv").read_text() == (tmp_path / "ix.tsv").read_text()


def test_eval_csv(tmp_path, graph_file):
    out = tmp_path / "e.csv"
    assert run("eval", "--graph", graph_file, "--method", "fora", "--sources", 4, "--seed", 7,
               "--k", 10, 20, "--workers", 2, "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 8
    assert {"query_id", "method", "k", "precision", "ndcg", "violations", "walks",
            "pushes", "violation_fraction"} <= set(rows[0])
    assert all(float(r["violation_fraction"]) <= 0.05 for r in rows)


def test_eval_topk_methods(tmp_path, graph_file):
    for method in ("topk-fast", "topk-refine", "mc-topk"):
        out = tmp_path / f"{method}.csv"
        assert run("eval", "--graph", graph_file, "--method", method, "--sources", 2,
                   "--k", 5, "--out", out) == 0
        assert float(next(csv.DictReader(out.open()))["precision"]) >= 0.6


def test_pagerank_and_bench(tmp_path, graph_file):
    assert run("pagerank", "--graph", graph_file, "--top", 5, "--out", tmp_path / "p.tsv") == 0
    assert len((tmp_path / "p.tsv").read_text().splitlines()) == 5
    assert run("bench", "--graph", graph_file, "--sources", 2, "--methods", "fora", "mc",
               "--out", tmp_path / "b.csv") == 0
    rows = list(csv.DictReader((tmp_path / "b.csv").open()))
    assert {r["method"] for r in rows} == {"fora", "mc"}


def test_exit_codes(tmp_path, graph_file, capsys):
    assert run("query", "--graph", tmp_path / "missing.txt", "--source", 0) == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("0 x\n")
    assert run("query", "--graph", bad, "--source", 0) == 4
    assert run("topk", "--graph", graph_file, "--source", 0, "--k", 0) == 2
    assert run("query", "--graph", graph_file, "--source", 10**6) == 2
    assert run("query", "--graph", graph_file, "--source", 0, "--method", "fora-plus") == 2
    assert run("query", "--graph", graph_file, "--source", 0, "--method", "fora-plus",
               "--index", graph_file) == 4
    small = tmp_path / "small.idx"
    run("build-index", "--graph", graph_file, "--out", small)
    assert run("topk", "--graph", graph_file, "--source", 0, "--k", 5, "--method", "fora-plus",
               "--index", small) == 4
    with pytest.raises(SystemExit) as exc:
        run("query", "--bogus")
    assert exc.value.code == 2
