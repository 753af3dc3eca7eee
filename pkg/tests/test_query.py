import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fora.exact import power_iteration
from fora.generate import cycle, erdos_renyi
from fora.graph import Graph, QueryParams
from fora.push import forward_push
from fora.query import (
    choose_r_max,
    global_pagerank,
    ppr_from_distribution,
    walk_count,
    walk_plan,
    whole_graph_balanced,
    whole_graph_basic,
    whole_graph_zero_hop,
)

from conftest import graphs

ALPHA = 0.2


def test_choose_r_max_case_one_frozen():
    g = erdos_renyi(1000, 10_000, 0)
    r = choose_r_max(g, QueryParams.for_graph(g))
    # independently evaluated at 40 digits
    assert r == pytest.approx(3.754473402165245462e-05, rel=1e-13)
    assert g.m * r <= 1


def test_choose_r_max_case_two_frozen():
    g = cycle(3)
    p = QueryParams(ALPHA, 0.9, 1.0, 0.99)
    assert choose_r_max(g, p) == pytest.approx(0.4430312312924775967, rel=1e-13)


def test_choose_r_max_grows_with_epsilon():
    g = erdos_renyi(1000, 10_000, 0)
    base = QueryParams.for_graph(g)
    rs = [choose_r_max(g, base.replace(epsilon=e)) for e in (0.1, 0.3, 0.5, 0.7)]
    assert all(a < b for a, b in zip(rs, rs[1:]))


def test_walk_count_snaps_near_integers():
    assert walk_count(0.0) == 0
    assert walk_count(3.0000000000001) == 3
    assert walk_count(2.9999999999999) == 3
    assert walk_count(3.01) == 4
    assert walk_count(0.2) == 1


def test_walk_plan_hands_out_exact_residue():
    r = np.array([0.0, 0.25, 0.5, 1e-7])
    nodes, counts, incs = walk_plan(r, 37.0)
    assert nodes.tolist() == [1, 2, 3]
    assert counts.tolist() == [10, 19, 1]
    assert np.allclose(counts * incs, r[nodes], rtol=0, atol=1e-18)
    # a_i = (r_i / r_sum) * (omega / omega_i) lies in (0, 1]
    a = r[nodes] * 37.0 / counts
    assert np.all((a > 0) & (a <= 1))


def test_fully_drained_push_means_no_walks():
    g = Graph.from_edges([0, 1], [1, 2], 3)
    est = whole_graph_basic(g, 0, QueryParams(ALPHA, 0.5, 0.1, 0.1), r_max=1e-9)
    assert est.walks_issued == 0 and est.r_sum == 0.0
    assert est.scores.tolist() == est.reserve.tolist()


def test_rmax_one_degenerates_to_monte_carlo():
    g = cycle(2)
    p = QueryParams(ALPHA, 0.5, 0.1, 0.1)
    est = whole_graph_basic(g, 0, p, r_max=1.0, rng=3)
    assert est.pushes == 0
    assert est.walks_issued == math.ceil(p.walks_per_residue)
    assert abs(est.scores.sum() - 1.0) < 1e-12


@settings(max_examples=50, deadline=None)
@given(graphs(), st.data(), st.integers(0, 2**63))
def test_normalization_every_variant(g, data, seed):
    s = data.draw(st.integers(0, g.n - 1))
    p = QueryParams.for_graph(g)
    runs = [
        whole_graph_basic(g, s, p, rng=seed),
        whole_graph_zero_hop(g, s, p, rng=seed),
        whole_graph_balanced(g, s, p, rng=seed),
        global_pagerank(g, p, rng=seed),
    ]
    for est in runs:
        assert abs(est.scores.sum() - 1.0) <= 1e-9
        assert np.all(est.scores >= 0)


def test_isolated_node_balanced():
    est = whole_graph_balanced(Graph.from_edges([], [], 1), 0, QueryParams())
    assert est.scores.tolist() == [1.0] and est.walks_issued == 0


def test_converged_balanced_equals_basic():
    g = Graph.from_edges([0, 0, 1], [1, 2, 2], 3)
    p = QueryParams(ALPHA, 0.5, 0.01, 0.01)
    a = whole_graph_basic(g, 0, p, r_max=1e-12, rng=1)
    b = whole_graph_balanced(g, 0, p, rng=1, rc=1e9)
    assert a.walks_issued == b.walks_issued == 0
    assert np.allclose(a.scores, b.scores, atol=1e-15)


def test_balanced_two_cycle_unbiased():
    g = cycle(2)
    p = QueryParams(ALPHA, 0.5, 0.5, 0.1)
    vals = []
    for seed in range(200):
        est = whole_graph_balanced(g, 0, p, rng=seed)
        assert abs(est.scores.sum() - 1.0) < 1e-9
        vals.append(est.scores[0])
    assert abs(np.mean(vals) - 5 / 9) < 0.01


def test_point_mass_distribution_is_bitwise_basic():
    g = erdos_renyi(60, 240, 2)
    p = QueryParams.for_graph(g)
    a = whole_graph_basic(g, 7, p, rng=5)
    b = ppr_from_distribution(g, {7: 1.0}, p, rng=5)
    assert np.array_equal(a.scores, b.scores)


def test_uniform_distribution_is_bitwise_global():
    g = erdos_renyi(60, 240, 2)
    p = QueryParams.for_graph(g)
    a = global_pagerank(g, p, rng=9)
    b = ppr_from_distribution(g, np.full(60, 1 / 60), p, rng=9)
    assert np.array_equal(a.scores, b.scores)


def test_global_pagerank_small_cases():
    assert global_pagerank(Graph.from_edges([], [], 1), QueryParams()).scores.tolist() == [1.0]
    est = global_pagerank(cycle(2), QueryParams(ALPHA, 0.5, 0.1, 0.1), rng=1)
    assert np.all(np.abs(est.scores - 0.5) <= 0.5 * 0.5)


def test_mixed_distribution_mean_on_two_cycle():
    p = QueryParams(ALPHA, 0.5, 0.5, 0.1)
    vals = [ppr_from_distribution(cycle(2), [0.5, 0.5], p, r_max=1.0, rng=s).scores[0]
            for s in range(100)]
    assert abs(np.mean(vals) - 0.5) < 0.02


def test_unbiased_against_oracle_on_small_graph():
    g = erdos_renyi(12, 30, 6)
    p = QueryParams(ALPHA, 0.5, 0.2, 0.2)
    exact = power_iteration(g, 0, ALPHA, 500, 1e-15).scores
    runs = np.array([whole_graph_basic(g, 0, p, rng=s).scores for s in range(300)])
    se = runs.std(axis=0, ddof=1) / np.sqrt(len(runs))
    assert np.all(np.abs(runs.mean(axis=0) - exact) <= 3 * se + 1e-12)


def test_fixed_seed_is_deterministic(backend):
    g = erdos_renyi(200, 1000, 1)
    p = QueryParams.for_graph(g)
    a = whole_graph_balanced(g, 3, p, rng=17, backend=backend)
    b = whole_graph_balanced(g, 3, p, rng=17, backend=backend)
    assert np.array_equal(a.scores, b.scores)


def test_estimate_top_is_ordered():
    est = whole_graph_basic(cycle(5), 0, QueryParams.for_graph(cycle(5)), rng=1)
    top = est.top(5)
    assert [v for v, _ in top][0] == 0
    assert all(a[1] >= b[1] for a, b in zip(top, top[1:]))


def test_push_cost_reported_as_pushes():
    g = erdos_renyi(100, 500, 3)
    p = QueryParams.for_graph(g)
    est = whole_graph_basic(g, 0, p)
    assert est.pushes == forward_push(g, 0, ALPHA, choose_r_max(g, p)).cost
