"""Timed-marking search states and the firing rule.

A state is stored as one integer per activity: ``UNSTARTED`` (-1), ``DONE``
(0), or a positive residual delay for an executing activity. The delayed
marking of the net is a function of this vector (see :func:`derived_marking`),
so two states with equal vectors are the same marking.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .net import TtpnrNet, enabled_transitions

UNSTARTED = -1
DONE = 0


class FiringError(ValueError):
    """Attempt to fire a transition that is not enabled."""


@dataclass(frozen=True)
class TimedState:
    status: tuple[int, ...]

    def is_unstarted(self, j: int) -> bool:
        return self.status[j] < 0

    def is_done(self, j: int) -> bool:
        return self.status[j] == DONE

    def residual(self, j: int) -> int:
        """Remaining time of an executing activity, 0 otherwise."""
        return self.status[j] if self.status[j] > 0 else 0

    @property
    def finished_count(self) -> int:
        return sum(1 for v in self.status if v == DONE)

    @property
    def active_count(self) -> int:
        return sum(1 for v in self.status if v > 0)

    def describe(self, names: str | None = None) -> str:
        parts = []
        for j, v in enumerate(self.status):
            name = names[j] if names else str(j)
            parts.append(f"{name}:" + ("-" if v < 0 else "done" if v == 0 else f"exec({v})"))
        return " ".join(parts)


@dataclass(frozen=True)
class FireResult:
    next: TimedState
    delta: int


def initial_state(net: TtpnrNet) -> TimedState:
    return TimedState((UNSTARTED,) * len(net.transitions))


def canonical_key(s: TimedState) -> bytes:
    """Little-endian int32 per activity: -1 unstarted, 0 done, residual if executing."""
    return struct.pack(f"<{len(s.status)}i", *s.status)


def is_goal(net: TtpnrNet, s: TimedState) -> bool:
    return s.status[-1] >= 0


def derived_marking(net: TtpnrNet, s: TimedState) -> dict[int, list[int]]:
    """Token delays per place (sorted, zero = available); empty places are omitted."""
    status = s.status
    inst = net.instance
    marking: dict[int, list[int]] = {}
    if status[0] < 0:
        marking[net.source_place] = [0]
    if status[-1] >= 0:
        marking[net.sink_place] = [0]
    for (i, j), p in net.edge_places.items():
        if status[i] >= 0 and status[j] < 0:
            marking[p] = [max(status[i], 0)]
    for r, p in enumerate(net.resource_places):
        busy = []
        for j, u in inst.resource_users[r]:
            if status[j] > 0:
                busy.extend([status[j]] * u)
        free = net.capacities[r] - len(busy)
        tokens = [0] * free + sorted(busy)
        if tokens:
            marking[p] = tokens
    return marking


def _resource_wait(status: tuple[int, ...], users, need: int, capacity: int) -> int:
    """Largest delay among the ``need`` smallest-delay tokens of one resource place."""
    busy = sorted((status[j], u) for j, u in users if status[j] > 0)
    free = capacity - sum(u for _, u in busy)
    if need <= free:
        return 0
    have = free
    for delay, u in busy:
        have += u
        if have >= need:
            return delay
    raise FiringError(f"resource place cannot supply {need} tokens")


def fire(net: TtpnrNet, s: TimedState, t: int) -> FireResult:
    """Fire transition ``t``: consume the smallest-delay tokens, jump time, produce delayed tokens."""
    status = s.status
    inst = net.instance
    if not 0 <= t < len(status) or status[t] >= 0:
        raise FiringError(f"transition {t} already fired or unknown")
    delta = 0
    for i in inst.predecessors[t]:
        if status[i] < 0:
            raise FiringError(f"transition {t} not enabled: predecessor {i} has not started")
        if status[i] > delta:
            delta = status[i]
    for r, u in enumerate(inst.activities[t].demands):
        if u > 0:
            wait = _resource_wait(status, inst.resource_users[r], u, net.capacities[r])
            if wait > delta:
                delta = wait
    nxt = []
    for j, v in enumerate(status):
        if j == t:
            nxt.append(inst.activities[t].duration)
        elif v > 0:
            nxt.append(v - delta if v > delta else DONE)
        else:
            nxt.append(v)
    return FireResult(TimedState(tuple(nxt)), delta)


def successors(net: TtpnrNet, s: TimedState) -> Iterator[tuple[int, FireResult]]:
    for t in enabled_transitions(net, s):
        yield t, fire(net, s, t)


@dataclass
class ReachabilityGraph:
    states: list[TimedState]
    edges: list[tuple[int, int, int, int]]  # (source index, transition, delta, target index)
    complete: bool


def explore(net: TtpnrNet, max_states: int = 200_000) -> ReachabilityGraph:
    """Breadth-first enumeration of the full reachability graph (states keyed canonically)."""
    s0 = initial_state(net)
    index = {canonical_key(s0): 0}
    states = [s0]
    edges = []
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for t, res in successors(net, states[u]):
            key = canonical_key(res.next)
            v = index.get(key)
            if v is None:
                if len(states) >= max_states:
                    return ReachabilityGraph(states, edges, False)
                v = len(states)
                index[key] = v
                states.append(res.next)
                queue.append(v)
            edges.append((u, t, res.delta, v))
    return ReachabilityGraph(states, edges, True)
