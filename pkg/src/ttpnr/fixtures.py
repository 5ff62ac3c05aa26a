"""Small hand-built instances used in tests, docs and the CLI smoke runs."""

from __future__ import annotations

from .instance import RcpspInstance

EXAMPLE1_NAMES = "abcdef"


def example1() -> RcpspInstance:
    """Two parallel chains a->b->c->f and a->d->e->f sharing one resource of capacity 2.

    Optimal makespan is 5 (b, d start at 0; c, e at 3).
    """
    a, b, c, d, e, f = range(6)
    return RcpspInstance.from_lists(
        durations=[0, 3, 1, 3, 2, 0],
        demands=[[0], [1], [1], [1], [1], [0]],
        edges=[(a, b), (a, d), (b, c), (d, e), (c, f), (e, f)],
        capacities=[2],
        name="example1",
    )


def two_parallel(capacity: int) -> RcpspInstance:
    """Two independent unit-duration activities each needing one unit of a single resource."""
    return RcpspInstance.from_lists(
        durations=[0, 1, 1, 0],
        demands=[[0], [1], [1], [0]],
        edges=[(0, 1), (0, 2), (1, 3), (2, 3)],
        capacities=[capacity],
        name=f"two_parallel_c{capacity}",
    )


def dummies_only() -> RcpspInstance:
    return RcpspInstance.from_lists(
        durations=[0, 0], demands=[[0], [0]], edges=[(0, 1)], capacities=[1], name="dummies"
    )
