"""Lower bounds on the remaining makespan of a timed state.

``h_cp`` relaxes resources (longest residual precedence path), ``h_res``
relaxes precedence (heaviest remaining resource workload over capacity,
rounded up), ``h_max`` takes the larger of the two.
"""

from __future__ import annotations

import enum
from typing import Callable, Sequence

from .instance import RcpspInstance, topological_order
from .state import TimedState


class HeuristicKind(str, enum.Enum):
    CRITICAL_PATH = "cp"
    RESOURCE_LOAD = "res"
    MAX = "max"
    ZERO = "zero"

    @classmethod
    def parse(cls, value: "str | HeuristicKind") -> "HeuristicKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown heuristic {value!r}; choose from cp, res, max, zero") from None


class HeuristicMismatch(AssertionError):
    """A zero-cost child's recomputed bound differs from the parent's cached one."""


def _cp(status: Sequence[int], durations: Sequence[int], preds: Sequence[Sequence[int]], topo: Sequence[int]) -> int:
    ref = [0] * len(status)
    for j in topo:
        v = status[j]
        if v == 0:
            continue
        if v > 0:
            ref[j] = v
        else:
            best = 0
            for i in preds[j]:
                if ref[i] > best:
                    best = ref[i]
            ref[j] = best + durations[j]
    return ref[-1]


def _res(status: Sequence[int], durations: Sequence[int], users, capacities: Sequence[int]) -> int:
    best = 0
    for r, cap in enumerate(capacities):
        work = 0
        for j, u in users[r]:
            v = status[j]
            if v > 0:
                work += v * u
            elif v < 0:
                work += durations[j] * u
        if work:
            bound = -(-work // cap)
            if bound > best:
                best = bound
    return best


def h_cp(inst: RcpspInstance, topo: Sequence[int], s: TimedState) -> int:
    """Residual earliest finish of the dummy sink, propagated in ``topo`` order."""
    durations = [a.duration for a in inst.activities]
    ref = [0] * inst.n_activities
    for j in topo:
        v = s.status[j]
        if v == 0:
            ref[j] = 0
        elif v > 0:
            ref[j] = v
        else:
            ref[j] = max((ref[i] for i in inst.predecessors[j]), default=0) + durations[j]
    return ref[inst.sink]


def h_res(inst: RcpspInstance, s: TimedState) -> int:
    """``max_r ceil(workload_r / c_r)``; executing work counts its residual, unstarted its duration."""
    durations = [a.duration for a in inst.activities]
    return _res(s.status, durations, inst.resource_users, inst.capacities)


def h_max(inst: RcpspInstance, topo: Sequence[int], s: TimedState, kind: HeuristicKind = HeuristicKind.MAX) -> int:
    kind = HeuristicKind.parse(kind)
    if kind is HeuristicKind.ZERO:
        return 0
    if kind is HeuristicKind.CRITICAL_PATH:
        return h_cp(inst, topo, s)
    if kind is HeuristicKind.RESOURCE_LOAD:
        return h_res(inst, s)
    return max(h_cp(inst, topo, s), h_res(inst, s))


def make_heuristic(inst: RcpspInstance, kind: "HeuristicKind | str" = HeuristicKind.MAX) -> Callable[[Sequence[int]], int]:
    """Bind a heuristic to ``inst``; the returned function takes a raw status vector."""
    kind = HeuristicKind.parse(kind)
    topo = topological_order(inst)
    durations = [a.duration for a in inst.activities]
    preds = inst.predecessors
    users = inst.resource_users
    caps = inst.capacities
    if kind is HeuristicKind.ZERO:
        return lambda status: 0
    if kind is HeuristicKind.CRITICAL_PATH:
        return lambda status: _cp(status, durations, preds, topo)
    if kind is HeuristicKind.RESOURCE_LOAD:
        return lambda status: _res(status, durations, users, caps)

    def both(status):
        a = _cp(status, durations, preds, topo)
        b = _res(status, durations, users, caps)
        return a if a > b else b

    return both


def cached_child_h(parent_h: int, delta: int, recompute: Callable[[], int], debug: bool = False) -> int:
    """Reuse the parent's bound across a zero-time firing, otherwise recompute.

    With ``debug`` the bound is recomputed anyway on zero-time edges and a
    :class:`HeuristicMismatch` is raised if it differs.
    """
    if delta == 0:
        if debug:
            fresh = recompute()
            if fresh != parent_h:
                raise HeuristicMismatch(f"zero-cost child bound {fresh} != cached parent bound {parent_h}")
        return parent_h
    return recompute()
