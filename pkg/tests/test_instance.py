import pytest
from hypothesis import given, settings, strategies as st

from ttpnr.instance import (
    Activity,
    CycleError,
    RcpspInstance,
    close_dummies,
    topological_order,
    validate_instance,
)
from ttpnr.oracle import random_instance


def test_example1_is_valid(ex1):
    assert validate_instance(ex1) == []
    assert ex1.n_activities == 6
    assert ex1.capacities == (2,)


def test_self_loop_reported(ex1):
    bad = ex1.with_precedence(list(ex1.precedence) + [(1, 1)])
    assert any("self-loop at 1" in v for v in validate_instance(bad))


def test_demand_exceeding_capacity_reported(ex1):
    acts = list(ex1.activities)
    acts[1] = Activity(1, 3, (3,))
    bad = RcpspInstance(tuple(acts), ex1.precedence, ex1.capacities)
    problems = validate_instance(bad)
    assert any("demand exceeds capacity" in v and "activity 1" in v for v in problems)


def test_dummy_with_duration_reported(ex1):
    acts = list(ex1.activities)
    acts[0] = Activity(0, 2, (0,))
    problems = validate_instance(RcpspInstance(tuple(acts), ex1.precedence, ex1.capacities))
    assert any("dummy activity 0" in v for v in problems)


def test_unknown_edge_and_cycle_reported(ex1):
    bad = ex1.with_precedence(list(ex1.precedence) + [(1, 9)])
    assert any("unknown activity" in v for v in validate_instance(bad))
    cyc = ex1.with_precedence(list(ex1.precedence) + [(2, 1)])
    assert any("cycle" in v for v in validate_instance(cyc))


def test_missing_dummy_edges_reported():
    inst = RcpspInstance.from_lists([0, 1, 1, 0], [[0], [1], [1], [0]], [(0, 1), (1, 3)], [1])
    problems = validate_instance(inst)
    assert any("missing dummy edge: activity 2" in v for v in problems)


def test_close_dummies_leaves_example1_unchanged(ex1):
    assert close_dummies(ex1) == ex1


def test_close_dummies_single_activity():
    inst = RcpspInstance.from_lists([0, 2, 0], [[0], [1], [0]], [], [1])
    assert close_dummies(inst).precedence == ((0, 1), (1, 2))


def test_close_dummies_dummy_only():
    inst = RcpspInstance.from_lists([0, 0], [[0], [0]], [], [1])
    assert close_dummies(inst).precedence == ((0, 1),)


def test_close_dummies_idempotent():
    inst = RcpspInstance.from_lists([0, 1, 2, 3, 0], [[0], [1], [1], [1], [0]], [(1, 2)], [2])
    once = close_dummies(inst)
    assert close_dummies(once) == once
    assert validate_instance(once) == []


def test_topological_order_example1(ex1):
    assert topological_order(ex1) == [0, 1, 3, 2, 4, 5]


def test_topological_order_chain():
    inst = RcpspInstance.from_lists([0, 1, 0], [[0], [0], [0]], [(0, 1), (1, 2)], [1])
    assert topological_order(inst) == [0, 1, 2]


def test_topological_order_cycle():
    inst = RcpspInstance.from_lists([0, 1, 1, 0], [[0]] * 4, [(0, 1), (1, 2), (2, 1), (2, 3)], [1])
    with pytest.raises(CycleError) as err:
        topological_order(inst)
    assert sorted(err.value.cycle) == [1, 2]


def test_equality_ignores_name(ex1):
    renamed = RcpspInstance(ex1.activities, ex1.precedence, ex1.capacities, name="other")
    assert renamed == ex1


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    n=st.integers(0, 12),
    k=st.integers(1, 3),
    p=st.floats(0.0, 0.8),
)
def test_closed_random_instances_valid(seed, n, k, p):
    inst = random_instance(seed, n, k, 5, 0.5, edge_prob=p)
    assert validate_instance(inst) == []
    assert not any("missing dummy edge" in v for v in validate_instance(close_dummies(inst)))
    order = topological_order(inst)
    assert len(order) == inst.n_activities
    pos = {j: q for q, j in enumerate(order)}
    assert all(pos[i] < pos[j] for i, j in inst.precedence)
