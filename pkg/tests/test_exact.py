import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import small_instances
from netprebunk.errors import ResourceError
from netprebunk.exact import (
    coicm_world,
    exact_coicm,
    exact_ic,
    exact_spread,
    ic_world,
    icn_world,
    live_edge_worlds,
)
from netprebunk.graph import Graph, NodeParams


def brute_icn(graph, params, seeds, x):
    """Every edge pattern times every deception-coin pattern."""
    qx = params.q_after(x)
    free = [v for v in range(graph.n) if v not in seeds]
    ap_p = np.zeros(graph.n)
    ap_m = np.zeros(graph.n)
    for live, pr in live_edge_worlds(graph):
        for coins in itertools.product((True, False), repeat=len(free)):
            w = pr
            deceived = [True] * graph.n
            for v, c in zip(free, coins):
                w *= qx[v] if c else 1.0 - qx[v]
                deceived[v] = c
            if w == 0.0:
                continue
            state = icn_world(graph, seeds, deceived, live)
            ap_p += w * (np.array(state) == 1)
            ap_m += w * (np.array(state) == -1)
    return ap_p, ap_m


def brute_ic(graph, seeds, blocked):
    ap = np.zeros(graph.n)
    for live, pr in live_edge_worlds(graph):
        ap += pr * (np.array(ic_world(graph, seeds, blocked, live)) == 1)
    return ap


def brute_coicm(graph, seeds_m, seeds_t, delay):
    ap_m = np.zeros(graph.n)
    ap_t = np.zeros(graph.n)
    for live, pr in live_edge_worlds(graph):
        st = np.array(coicm_world(graph, seeds_m, seeds_t, live, delay))
        ap_m += pr * (st == 1)
        ap_t += pr * (st == -1)
    return ap_m, ap_t


def test_seed_only():
    g = Graph.from_edges(["s"], [])
    sp, sm, _, _ = exact_spread(g, NodeParams([0.3], [0.3]), [0])
    assert (sp, sm) == (1.0, 0.0)


def test_single_edge():
    g = Graph.from_edges(["s", "v"], [(0, 1, 0.5)])
    sp, sm, _, _ = exact_spread(g, NodeParams([1, 1], [0, 0]), [0])
    assert sp == pytest.approx(1.5) and sm == 0.0


def test_path_of_half_coins():
    g = Graph.from_edges(["s", "u", "v"], [(0, 1, 1.0), (1, 2, 1.0)])
    _, _, ap, am = exact_spread(g, NodeParams([1, 0.5, 0.5], [0, 0, 0]), [0])
    assert ap[2] == pytest.approx(0.25) and am[2] == pytest.approx(0.75)


def test_diamond_by_hand():
    # s -> a, b -> v, all edges live; v sees two arrivals in the same round.
    # v is positive only if both parents are positive and v's own coin succeeds.
    g = Graph.from_edges(["s", "a", "b", "v"], [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
    sp, sm, ap, am = exact_spread(g, NodeParams([1, 0.5, 0.5, 0.5], [0] * 4), [0])
    assert ap[3] == pytest.approx(0.125)
    assert am[3] == pytest.approx(0.875)
    assert sp == pytest.approx(2.125) and sm == pytest.approx(1.875)


def test_budget_exceeded():
    g = Graph.from_edges([str(i) for i in range(14)], [(i, i + 1, 0.5) for i in range(13)])
    with pytest.raises(ResourceError):
        exact_spread(g, NodeParams([0.5] * 14, [0.5] * 14), [0])


@settings(max_examples=60, deadline=None)
@given(small_instances(max_nodes=5, max_edges=7))
def test_branching_matches_full_enumeration(inst):
    graph, params, seeds, x = inst
    _, _, ap, am = exact_spread(graph, params, seeds, x)
    bp, bm = brute_icn(graph, params, seeds, x)
    np.testing.assert_allclose(ap, bp, atol=1e-12)
    np.testing.assert_allclose(am, bm, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(small_instances(max_nodes=6, max_edges=9))
def test_ic_matches_full_enumeration(inst):
    graph, _, seeds, x = inst
    _, ap = exact_ic(graph, seeds, x)
    np.testing.assert_allclose(ap, brute_ic(graph, seeds, x), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(small_instances(max_nodes=6, max_edges=9))
def test_coicm_matches_full_enumeration(inst):
    graph, _, seeds, x = inst
    for delay in (0, 1, 2):
        _, _, am, at = exact_coicm(graph, seeds, x, delay)
        bm, bt = brute_coicm(graph, seeds, x, delay)
        np.testing.assert_allclose(am, bm, atol=1e-12)
        np.testing.assert_allclose(at, bt, atol=1e-12)


@settings(max_examples=80, deadline=None)
@given(small_instances())
def test_total_spread_independent_of_intervention(inst):
    graph, params, seeds, x = inst
    sp, sm, _, _ = exact_spread(graph, params, seeds, x)
    bp, bm, _, _ = exact_spread(graph, params, seeds)
    assert sp + sm == pytest.approx(bp + bm, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(small_instances())
def test_prebunking_one_more_node_never_raises_positive_spread(inst):
    graph, params, seeds, x = inst
    base, _, _, _ = exact_spread(graph, params, seeds, x)
    for w in range(graph.n):
        if w in seeds or w in x:
            continue
        more, _, _, _ = exact_spread(graph, params, seeds, sorted(x + [w]))
        assert more <= base + 1e-12


@settings(max_examples=60, deadline=None)
@given(small_instances())
def test_full_susceptibility_degenerates_to_ic(inst):
    graph, params, seeds, _ = inst
    ones = NodeParams(np.ones(graph.n), params.eps)
    _, _, ap, am = exact_spread(graph, ones, seeds)
    _, ic = exact_ic(graph, seeds)
    np.testing.assert_allclose(ap, ic, atol=1e-12)
    assert np.all(am == 0)


@settings(max_examples=60, deadline=None)
@given(small_instances())
def test_probabilities_are_disjoint(inst):
    graph, params, seeds, x = inst
    _, _, ap, am = exact_spread(graph, params, seeds, x)
    assert np.all(ap + am <= 1 + 1e-12)
    np.testing.assert_allclose(ap[seeds], 1.0, atol=1e-12)
