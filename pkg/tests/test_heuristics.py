import heapq

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import small_instances
from ttpnr.heuristics import (
    HeuristicKind,
    HeuristicMismatch,
    cached_child_h,
    h_cp,
    h_max,
    h_res,
    make_heuristic,
)
from ttpnr.instance import RcpspInstance, topological_order
from ttpnr.kernels import KernelData, h_cp_kernel, h_cp_numpy, h_res_kernel, h_res_numpy
from ttpnr.net import build_net
from ttpnr.oracle import random_instance
from ttpnr.state import TimedState, explore, fire, initial_state, is_goal

KINDS = ["cp", "res", "max", "zero"]


def cost_to_go(net, graph):
    """Exact remaining makespan for every reachable state (reverse Dijkstra)."""
    rev = [[] for _ in graph.states]
    for u, _, delta, v in graph.edges:
        rev[v].append((u, delta))
    dist = [None] * len(graph.states)
    heap = [(0, i) for i, s in enumerate(graph.states) if is_goal(net, s)]
    while heap:
        d, v = heapq.heappop(heap)
        if dist[v] is not None:
            continue
        dist[v] = d
        for u, w in rev[v]:
            if dist[u] is None:
                heapq.heappush(heap, (d + w, u))
    return dist


def test_example1_initial_values(ex1, ex1_net):
    topo = topological_order(ex1)
    s0 = initial_state(ex1_net)
    assert h_cp(ex1, topo, s0) == 5
    # workload (3+1+3+2)*1 = 9 on capacity 2 -> ceil = 5
    assert h_res(ex1, s0) == 5
    assert h_max(ex1, topo, s0) == 5


def test_example1_after_a_b_d(ex1, ex1_net):
    topo = topological_order(ex1)
    s = initial_state(ex1_net)
    for t in (0, 1, 3):
        s = fire(ex1_net, s, t).next
    assert h_cp(ex1, topo, s) == 5
    assert h_res(ex1, s) == 5


def test_h_res_rounds_up():
    # one activity of duration 3, demand 1, capacity 2: 3/2 -> 2
    inst = RcpspInstance.from_lists([0, 3, 0], [[0], [1], [0]], [(0, 1), (1, 2)], [2])
    assert h_res(inst, TimedState((-1, -1, -1))) == 2
    assert h_res(inst, TimedState((0, 1, -1))) == 1
    assert h_cp(inst, [0, 1, 2], TimedState((0, 1, -1))) == 1


def test_goal_bound_is_zero(ex1, ex1_net):
    s = initial_state(ex1_net)
    for t in (0, 1, 3, 2, 4, 5):
        s = fire(ex1_net, s, t).next
    for kind in KINDS:
        assert make_heuristic(ex1, kind)(s.status) == 0


def test_make_heuristic_matches_public_functions(ex1, ex1_net):
    topo = topological_order(ex1)
    graph = explore(ex1_net)
    for kind in KINDS:
        h = make_heuristic(ex1, kind)
        for s in graph.states:
            assert h(s.status) == h_max(ex1, topo, s, kind)


def test_parse_rejects_unknown():
    assert HeuristicKind.parse("MAX") is HeuristicKind.MAX
    with pytest.raises(ValueError):
        HeuristicKind.parse("lp")


def _check_bounds(inst):
    net = build_net(inst)
    graph = explore(net)
    assert graph.complete
    dist = cost_to_go(net, graph)
    for kind in KINDS:
        h = make_heuristic(inst, kind)
        hv = [h(s.status) for s in graph.states]
        for u, _, delta, v in graph.edges:
            assert hv[u] <= delta + hv[v], (kind, graph.states[u], graph.states[v])
            if delta == 0:
                assert hv[u] == hv[v]
        for i, s in enumerate(graph.states):
            if dist[i] is not None:
                assert hv[i] <= dist[i]
            if is_goal(net, s):
                assert hv[i] == 0


def test_consistency_example1(ex1):
    _check_bounds(ex1)


@pytest.mark.parametrize("inst", small_instances(25), ids=lambda i: f"n{i.n_activities}")
def test_consistency_small_instances(inst):
    _check_bounds(inst)


def test_cached_child_h():
    calls = []

    def recompute():
        calls.append(1)
        return 7

    assert cached_child_h(4, 0, recompute) == 4 and not calls
    assert cached_child_h(4, 2, recompute) == 7 and len(calls) == 1
    assert cached_child_h(7, 0, recompute, debug=True) == 7
    with pytest.raises(HeuristicMismatch):
        cached_child_h(4, 0, recompute, debug=True)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 8), k=st.integers(1, 3))
def test_kernel_and_numpy_bounds_match_reference(seed, n, k):
    inst = random_instance(seed, n, k, 6, 0.6, edge_prob=0.3, zero_duration_prob=0.1)
    data = KernelData.from_instance(inst)
    net = build_net(inst)
    cp = make_heuristic(inst, "cp")
    res = make_heuristic(inst, "res")
    graph = explore(net, max_states=400)
    for s in graph.states:
        status = np.asarray(s.status, dtype=np.int16)
        want_cp, want_res = cp(s.status), res(s.status)
        assert h_cp_kernel(status, data.durations, data.pred_ptr, data.pred_idx, data.topo) == want_cp
        assert h_cp_numpy(status, data.durations, data.pred_ptr, data.pred_idx, data.topo) == want_cp
        assert h_res_kernel(status, data.durations, data.demands, data.caps) == want_res
        assert h_res_numpy(status, data.durations, data.demands, data.caps) == want_res
