"""RCPSP instance model.

Activities are dense integer ids ``0..n+1`` where ``0`` is the dummy start and
``n+1`` the dummy finish. Instances are immutable; derived lookups (predecessor
lists, numpy views for the kernels) are computed lazily and cached.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class InstanceError(ValueError):
    """Raised when an instance cannot be used (invalid structure)."""


class CycleError(InstanceError):
    """The precedence graph contains a cycle; ``cycle`` lists one of them."""

    def __init__(self, cycle: list[int]):
        self.cycle = cycle
        super().__init__("precedence cycle: " + " -> ".join(map(str, cycle + cycle[:1])))


@dataclass(frozen=True)
class Activity:
    id: int
    duration: int
    demands: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "demands", tuple(int(u) for u in self.demands))


@dataclass(frozen=True)
class RcpspInstance:
    activities: tuple[Activity, ...]
    precedence: tuple[tuple[int, int], ...]
    capacities: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "activities", tuple(self.activities))
        edges = sorted({(int(i), int(j)) for i, j in self.precedence})
        object.__setattr__(self, "precedence", tuple(edges))
        object.__setattr__(self, "capacities", tuple(int(c) for c in self.capacities))

    @classmethod
    def from_lists(
        cls,
        durations: Sequence[int],
        demands: Sequence[Sequence[int]],
        edges: Iterable[tuple[int, int]],
        capacities: Sequence[int],
        name: str = "",
    ) -> "RcpspInstance":
        acts = tuple(Activity(j, int(d), tuple(u)) for j, (d, u) in enumerate(zip(durations, demands)))
        return cls(acts, tuple(edges), tuple(capacities), name)

    @property
    def n_activities(self) -> int:
        """Number of activities including both dummies."""
        return len(self.activities)

    @property
    def n_resources(self) -> int:
        return len(self.capacities)

    @property
    def sink(self) -> int:
        return len(self.activities) - 1

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        preds: list[list[int]] = [[] for _ in self.activities]
        for i, j in self.precedence:
            preds[j].append(i)
        return tuple(tuple(p) for p in preds)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        succs: list[list[int]] = [[] for _ in self.activities]
        for i, j in self.precedence:
            succs[i].append(j)
        return tuple(tuple(s) for s in succs)

    @cached_property
    def resource_users(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per resource, the ``(activity, demand)`` pairs with positive demand."""
        return tuple(
            tuple((a.id, a.demands[r]) for a in self.activities if a.demands[r] > 0)
            for r in range(self.n_resources)
        )

    @cached_property
    def durations(self) -> np.ndarray:
        arr = np.array([a.duration for a in self.activities], dtype=np.int64)
        arr.flags.writeable = False
        return arr

    @cached_property
    def demand_matrix(self) -> np.ndarray:
        """``(n_activities, n_resources)`` demand matrix."""
        arr = np.zeros((self.n_activities, self.n_resources), dtype=np.int64)
        for a in self.activities:
            if len(a.demands) == self.n_resources:
                arr[a.id] = a.demands
        arr.flags.writeable = False
        return arr

    @cached_property
    def capacity_array(self) -> np.ndarray:
        arr = np.array(self.capacities, dtype=np.int64)
        arr.flags.writeable = False
        return arr

    def with_precedence(self, edges: Iterable[tuple[int, int]]) -> "RcpspInstance":
        return RcpspInstance(self.activities, tuple(edges), self.capacities, self.name)


def _find_cycle(n: int, succs: Sequence[Sequence[int]], candidates: Iterable[int]) -> list[int]:
    # iterative DFS restricted to nodes Kahn could not order
    allowed = set(candidates)
    color = dict.fromkeys(allowed, 0)
    for root in sorted(allowed):
        if color[root]:
            continue
        stack = [(root, iter(sorted(s for s in succs[root] if s in allowed)))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                color[node] = 2
            elif color[nxt] == 1:
                return path[path.index(nxt):]
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(s for s in succs[nxt] if s in allowed))))
    return []


def _kahn(n: int, edges: Iterable[tuple[int, int]]) -> tuple[list[int], list[list[int]]]:
    succs: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for i, j in edges:
        succs[i].append(j)
        indeg[j] += 1
    for s in succs:
        s.sort()
    queue = deque(j for j in range(n) if indeg[j] == 0)
    order = []
    while queue:
        i = queue.popleft()
        order.append(i)
        for j in succs[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    return order, succs


def topological_order(inst: RcpspInstance) -> list[int]:
    """FIFO Kahn order; initial sources and newly freed successors are queued by ascending id.

    Raises :class:`CycleError` naming one cycle if the graph is cyclic.
    """
    n = inst.n_activities
    order, succs = _kahn(n, inst.precedence)
    if len(order) != n:
        left = set(range(n)) - set(order)
        raise CycleError(_find_cycle(n, succs, left))
    return order


def validate_instance(inst: RcpspInstance) -> list[str]:
    """Return the list of violated invariants; empty means the instance is valid."""
    out: list[str] = []
    n = inst.n_activities
    k = inst.n_resources
    if n < 2:
        return [f"need at least the two dummy activities, got {n}"]
    for pos, a in enumerate(inst.activities):
        if a.id != pos:
            out.append(f"activity at position {pos} has id {a.id}")
        if a.duration < 0:
            out.append(f"negative duration at {a.id}")
        if len(a.demands) != k:
            out.append(f"demand vector length {len(a.demands)} != {k} resources at {a.id}")
        if any(u < 0 for u in a.demands):
            out.append(f"negative demand at {a.id}")
    for r, c in enumerate(inst.capacities):
        if c <= 0:
            out.append(f"non-positive capacity {c} for resource {r}")
    for dummy in (0, n - 1):
        a = inst.activities[dummy]
        if a.duration != 0:
            out.append(f"dummy activity {dummy} has non-zero duration {a.duration}")
        if any(a.demands):
            out.append(f"dummy activity {dummy} has non-zero demand")
    for a in inst.activities:
        for r, (u, c) in enumerate(zip(a.demands, inst.capacities)):
            if u > c:
                out.append(f"demand exceeds capacity: activity {a.id} needs {u} of resource {r}, capacity {c}")

    good_edges = []
    for i, j in inst.precedence:
        if not (0 <= i < n and 0 <= j < n):
            out.append(f"edge ({i}, {j}) references an unknown activity")
        elif i == j:
            out.append(f"self-loop at {i}")
        else:
            good_edges.append((i, j))

    order, succs = _kahn(n, good_edges)
    if len(order) != n:
        cycle = _find_cycle(n, succs, set(range(n)) - set(order))
        out.append("precedence cycle: " + " -> ".join(map(str, cycle + cycle[:1])))
        return out

    preds: list[list[int]] = [[] for _ in range(n)]
    for i, j in good_edges:
        preds[j].append(i)
    from_source = _reach(0, succs)
    to_sink = _reach(n - 1, preds)
    for j in range(1, n - 1):
        if j not in from_source:
            out.append(f"missing dummy edge: activity {j} not reachable from 0")
        if j not in to_sink:
            out.append(f"missing dummy edge: activity {j} does not reach {n - 1}")
    if n - 1 not in from_source:
        out.append(f"missing dummy edge: sink {n - 1} not reachable from 0")
    return out


def _reach(start: int, adj: Sequence[Sequence[int]]) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return seen


def close_dummies(inst: RcpspInstance) -> RcpspInstance:
    """Connect dangling activities to the dummy start/finish. Idempotent."""
    n = inst.n_activities
    sink = n - 1
    edges = set(inst.precedence)
    has_pred = {j for _, j in edges}
    for j in range(1, sink):
        if j not in has_pred:
            edges.add((0, j))
    has_succ = {i for i, _ in edges}
    for j in range(sink):
        if j not in has_succ:
            edges.add((j, sink))
    if edges == set(inst.precedence):
        return inst
    return inst.with_precedence(edges)


def check_instance(inst: RcpspInstance) -> None:
    """Raise :class:`InstanceError` listing every violation, if any."""
    problems = validate_instance(inst)
    if problems:
        raise InstanceError("invalid instance: " + "; ".join(problems))
