import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fora.exact import power_iteration, precision_at_k, true_topk
from fora.generate import ba_preferential, cycle, erdos_renyi
from fora.graph import Graph, QueryParams
from fora.index import IndexMismatchError, build_index
from fora.topk import (
    BoundState,
    delta_schedule,
    mc_topk,
    topk_bound_refine,
    topk_fast,
    topk_index_params,
    update_bounds,
)

from conftest import graphs

ALPHA = 0.2


def check_entries(res, k):
    assert len(res.entries) == k
    for (v1, s1), (v2, s2) in zip(res.entries, res.entries[1:]):
        assert s1 > s2 or (s1 == s2 and v1 < v2)
    assert all(s >= 0 for _, s in res.entries)


def test_delta_schedule():
    assert list(delta_schedule(16, 2)) == [0.5, 0.25, 0.125, 0.0625]
    assert list(delta_schedule(10, 10)) == [0.1]
    assert list(delta_schedule(12, 2)) == [0.5, 0.25, 0.125, 1 / 12]


def test_update_bounds_vacuous_node():
    st0 = BoundState.initial(1)
    out = update_bounds(st0, np.zeros(1), np.zeros(1), 0.3, 1000.0, 0.01)
    L = np.log(2 / 0.01)
    lam = ((2 / 3) * 0.3 * L + np.sqrt((4 / 9) * 0.09 * L**2 + 8 * 0.3 * 1000 * L)) / 2000
    assert out.lb[0] == 0.0
    assert out.ub[0] == pytest.approx(min(1.0, lam))


def test_update_bounds_collapse_with_many_walks():
    st0 = BoundState.initial(3)
    est = np.array([0.5, 0.3, 0.2])
    out = update_bounds(st0, est * 0.9, est, 0.1, 1e14, 0.01)
    assert np.allclose(out.lb, est, rtol=1e-5) and np.allclose(out.ub, est, rtol=1e-5)


def test_update_bounds_exact_when_no_residue():
    est = np.array([0.7, 0.3])
    out = update_bounds(BoundState.initial(2), est, est, 0.0, 0.0, 0.01)
    assert out.lb.tolist() == est.tolist() and out.ub.tolist() == est.tolist()


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(1e-6, 1),
                          st.floats(1.0, 1e7)), min_size=1, max_size=6))
def test_bounds_stay_ordered_and_monotone(rounds):
    state = BoundState.initial(1)
    for est, res_frac, r_sum, omega in rounds:
        new = update_bounds(state, np.array([est * res_frac]), np.array([est]), r_sum, omega, 1e-3)
        assert 0 <= new.lb[0] <= new.ub[0] <= 1
        assert new.ub[0] <= state.ub[0]
        if new.lb[0] < state.lb[0]:
            # only when the fresh interval sits entirely below the old lower bound
            assert new.lb[0] == new.ub[0]
        state = new


def test_k_equals_n_returns_everything():
    g = Graph.from_edges([0, 1, 2], [1, 2, 0], 3)
    p = QueryParams.for_graph(g)
    for res in (topk_fast(g, "fora", 0, 3, p), topk_bound_refine(g, "fora", 0, 3, p)):
        assert sorted(res.nodes) == [0, 1, 2]
        check_entries(res, 3)
    assert topk_fast(g, "fora", 0, 3, p).iterations == 1


def test_star_leaf_is_top_one(star3):
    p = QueryParams.for_graph(star3)
    for run in (topk_fast, topk_bound_refine):
        assert run(star3, "fora", 0, 1, p).nodes[0] in (1, 2)


def test_two_cycle_top_one():
    g = cycle(2)
    p = QueryParams.for_graph(g)
    for run in (topk_fast, topk_bound_refine):
        (v, s), = run(g, "fora", 0, 1, p, rng=4).entries
        assert v == 0 and abs(s - 5 / 9) <= 0.5 * 5 / 9


def test_k_out_of_range():
    g = cycle(3)
    for run in (topk_fast, topk_bound_refine):
        with pytest.raises(ValueError):
            run(g, "fora", 0, 0, QueryParams.for_graph(g))
        with pytest.raises(ValueError):
            run(g, "fora", 0, 4, QueryParams.for_graph(g))


def test_hub_found_early():
    g = ba_preferential(1000, 3, 1)
    p = QueryParams.for_graph(g)
    hub = int(np.argmax(g.out_degrees))
    res = topk_fast(g, "fora", hub, 1, p, rng=2)
    exact = power_iteration(g, hub, ALPHA, 300, 1e-13)
    top = exact.scores[hub]
    # first schedule value with (1 + eps) * delta <= pi(s, v_1*) is reached on round
    expected = int(np.ceil(np.log2((1 + p.epsilon) / top))) + 1
    assert res.nodes == [hub]
    assert res.iterations <= expected + 1
    assert res.iterations <= np.log2(g.n) / 2
    assert res.delta_final <= top


@pytest.mark.parametrize("refine", [False, True])
def test_index_estimator_matches_online(refine):
    g = erdos_renyi(300, 1500, 3)
    p = QueryParams.for_graph(g)
    qp, r = topk_index_params(g, p, 5, "refine" if refine else "fast")
    idx = build_index(g, qp, r, seed=21)
    run = topk_bound_refine if refine else topk_fast
    for s in (0, 17, 123):
        a = run(g, "fora", s, 5, p, rng=21)
        b = run(g, "fora-plus", s, 5, p, index=idx)
        assert a.entries == b.entries and a.summary() == b.summary()


def test_undersized_index_is_rejected():
    g = erdos_renyi(200, 800, 3)
    p = QueryParams.for_graph(g)
    idx = build_index(g, p, seed=1)
    with pytest.raises(IndexMismatchError):
        topk_fast(g, "fora-plus", 0, 5, p, index=idx)
    with pytest.raises(ValueError):
        topk_fast(g, "fora-plus", 0, 5, p)


def test_mc_topk_small_cases():
    one = Graph.from_edges([], [], 1)
    assert mc_topk(one, 0, 1, QueryParams.for_graph(one)).entries == [(0, 1.0)]
    res = mc_topk(cycle(2), 0, 2, QueryParams.for_graph(cycle(2)), rng=3)
    assert abs(sum(s for _, s in res.entries) - 1.0) <= 1e-9


def test_mc_topk_precision():
    g = erdos_renyi(200, 1000, 8)
    p = QueryParams.for_graph(g)
    prec = []
    for seed in range(20):
        exact = power_iteration(g, seed, ALPHA, 300, 1e-13)
        prec.append(precision_at_k(mc_topk(g, seed, 10, p, rng=seed).nodes, exact, 10))
    assert np.mean(prec) >= 0.9


def test_deterministic_given_seed():
    g = erdos_renyi(200, 1000, 8)
    p = QueryParams.for_graph(g)
    for run in (topk_fast, topk_bound_refine):
        assert run(g, "fora", 1, 10, p, rng=5) == run(g, "fora", 1, 10, p, rng=5)


def test_refine_bounds_contain_truth_on_small_graphs():
    total = viol = 0
    for seed in range(10):
        g = erdos_renyi(60, 240, seed)
        p = QueryParams.for_graph(g)
        exact = power_iteration(g, 0, ALPHA, 500, 1e-15).scores
        res = topk_bound_refine(g, "fora", 0, 5, p, rng=seed, record_bounds=True)
        prev = BoundState.initial(g.n)
        for b in res.history:
            assert np.all(b.ub <= prev.ub)
            viol += int(np.sum((b.lb > exact + 1e-12) | (b.ub < exact - 1e-12)))
            total += g.n
            prev = b
    assert viol <= 1


def test_returned_nodes_close_to_truth():
    g = erdos_renyi(400, 2400, 11)
    p = QueryParams.for_graph(g)
    eps = p.epsilon
    for s in range(10):
        exact = power_iteration(g, s, ALPHA, 300, 1e-13).scores
        star = exact[true_topk(exact, 10)]
        res = topk_fast(g, "fora", s, 10, p, rng=s)
        for i, (v, est) in enumerate(res.entries):
            if star[i] > res.delta_final:
                assert est >= (1 - eps) * exact[v]
                assert exact[v] >= (1 - eps) * star[i]


@settings(max_examples=25, deadline=None)
@given(graphs(max_n=15), st.data())
def test_topk_entries_well_formed(g, data):
    k = data.draw(st.integers(1, g.n))
    s = data.draw(st.integers(0, g.n - 1))
    p = QueryParams.for_graph(g)
    for res in (topk_fast(g, "fora", s, k, p), topk_bound_refine(g, "fora", s, k, p),
                mc_topk(g, s, k, p)):
        check_entries(res, k)
        assert len(set(res.nodes)) == k
