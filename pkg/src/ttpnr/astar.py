"""A* over the reachability graph of the timed net.

Open-list order: lowest ``f = g + h``, then highest ``g``, then most finished
activities, then most executing activities, then insertion order. Duplicate
states are detected by their canonical key; a state is expanded at most once
(the heuristics are consistent, so the first expansion carries the optimal
``g``).

Two engines share these semantics: ``"python"`` (this module, node objects and
``heapq``) and ``"kernel"`` (the compiled loop in :mod:`ttpnr.kernels`). Both
expand the same states in the same order.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from .heuristics import HeuristicKind, HeuristicMismatch, cached_child_h, make_heuristic
from .instance import RcpspInstance
from .net import TtpnrNet, build_net, enabled_transitions
from .oracle import Schedule
from .state import TimedState, canonical_key, fire, initial_state, is_goal

SOLVED = "solved"
TIMEOUT = "timeout"
INFEASIBLE = "infeasible"

CLOCK_CHECK_EVERY = 1024


@dataclass(frozen=True)
class Budget:
    timeout: float = 300.0
    node_limit: Optional[int] = None

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0
    duplicates_pruned: int = 0
    zero_cost_cache_hits: int = 0
    peak_open: int = 0
    peak_closed: int = 0
    wall_time: float = 0.0
    reopen_violations: int = 0
    cache_mismatches: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchNode:
    state: TimedState
    g: int
    h: int
    fired: Optional[int]
    parent: Optional["SearchNode"]
    finished_count: int
    active_count: int
    seq: int

    @property
    def f(self) -> int:
        return self.g + self.h

    def priority(self) -> tuple[int, int, int, int, int]:
        return (self.g + self.h, -self.g, -self.finished_count, -self.active_count, self.seq)


@dataclass
class SolveOutcome:
    status: str
    stats: SearchStats
    schedule: Optional[Schedule] = None
    heuristic: str = HeuristicKind.MAX.value
    engine: str = "python"
    trace: list = field(default_factory=list, repr=False)

    @property
    def makespan(self) -> Optional[int]:
        return self.schedule.makespan if self.schedule is not None else None

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


def _make_node(state: TimedState, g: int, h: int, fired, parent, seq: int) -> SearchNode:
    fin = act = 0
    for v in state.status:
        if v == 0:
            fin += 1
        elif v > 0:
            act += 1
    return SearchNode(state, g, h, fired, parent, fin, act, seq)


def _python_search(
    net: TtpnrNet,
    kind: HeuristicKind,
    budget: Budget,
    debug: bool = False,
    trace_limit: int = 0,
) -> tuple[str, Optional[SearchNode], SearchStats, list]:
    inst = net.instance
    heur = make_heuristic(inst, kind)
    stats = SearchStats()
    t0 = time.perf_counter()
    deadline = t0 + budget.timeout
    trace = []

    s0 = initial_state(net)
    root = _make_node(s0, 0, heur(s0.status), None, None, 0)
    seq = 1
    open_heap = [(root.priority(), root)]
    best_open: dict[bytes, int] = {canonical_key(s0): 0}
    closed: dict[bytes, int] = {}

    status = INFEASIBLE
    goal = None
    while open_heap:
        _, node = heapq.heappop(open_heap)
        key = canonical_key(node.state)
        seen = closed.get(key)
        if seen is not None:
            if node.g < seen:
                stats.reopen_violations += 1
            continue
        closed[key] = node.g
        stats.expanded += 1
        if trace_limit:
            trace.append((key, node.g, node.h, node.f))
            if len(trace) >= trace_limit:
                status = TIMEOUT
                break
        if is_goal(net, node.state):
            status, goal = SOLVED, node
            break
        if budget.node_limit is not None and stats.expanded >= budget.node_limit:
            status = TIMEOUT
            break
        if stats.expanded % CLOCK_CHECK_EVERY == 0 and time.perf_counter() > deadline:
            status = TIMEOUT
            break

        for t in enabled_transitions(net, node.state):
            res = fire(net, node.state, t)
            stats.generated += 1
            child = res.next
            ckey = canonical_key(child)
            g2 = node.g + res.delta
            seen = closed.get(ckey)
            if seen is not None:
                if g2 < seen:
                    stats.reopen_violations += 1
                stats.duplicates_pruned += 1
                continue
            prev = best_open.get(ckey)
            if prev is not None and prev <= g2:
                stats.duplicates_pruned += 1
                continue
            best_open[ckey] = g2
            if res.delta == 0:
                stats.zero_cost_cache_hits += 1
            try:
                h2 = cached_child_h(node.h, res.delta, lambda: heur(child.status), debug=debug)
            except HeuristicMismatch:
                stats.cache_mismatches += 1
                raise
            cnode = _make_node(child, g2, h2, t, node, seq)
            seq += 1
            heapq.heappush(open_heap, (cnode.priority(), cnode))
        if len(open_heap) > stats.peak_open:
            stats.peak_open = len(open_heap)
    stats.peak_closed = len(closed)
    stats.wall_time = time.perf_counter() - t0
    return status, goal, stats, trace


def extract_schedule(goal_node: SearchNode) -> Schedule:
    """Each fired activity starts at the clock value of the node its firing created."""
    starts: dict[int, int] = {}
    node = goal_node
    while node is not None:
        if node.fired is not None:
            starts[node.fired] = node.g
        node = node.parent
    return Schedule(starts, goal_node.g)


def resolve_engine(engine: Optional[str]) -> str:
    from . import kernels

    if engine in (None, "auto"):
        return "kernel" if kernels.NUMBA_ENABLED else "python"
    if engine not in ("python", "kernel"):
        raise ValueError(f"unknown engine {engine!r}")
    return engine


def solve(
    net: "TtpnrNet | RcpspInstance",
    heuristic: "HeuristicKind | str" = HeuristicKind.MAX,
    budget: Optional[Budget] = None,
    *,
    engine: Optional[str] = None,
    debug: bool = False,
) -> SolveOutcome:
    """Run A* to the first expanded goal.

    ``engine`` is ``"python"``, ``"kernel"`` or ``None``/``"auto"`` (kernel when
    numba is active). ``debug`` recomputes the bound on every zero-time edge and
    raises if the cached value differs.
    """
    if isinstance(net, RcpspInstance):
        net = build_net(net)
    kind = HeuristicKind.parse(heuristic)
    budget = budget or Budget()
    engine = resolve_engine(engine)
    if engine == "kernel":
        from .kernels import kernel_solve

        return kernel_solve(net, kind, budget, debug=debug)
    status, goal, stats, _ = _python_search(net, kind, budget, debug=debug)
    schedule = extract_schedule(goal) if goal is not None else None
    return SolveOutcome(status, stats, schedule, kind.value, "python")


def expand_trace(
    net: "TtpnrNet | RcpspInstance",
    heuristic: "HeuristicKind | str" = HeuristicKind.MAX,
    limit: int = 100,
) -> list[tuple[bytes, int, int, int]]:
    """The first ``limit`` expansions as ``(state key, g, h, f)``."""
    if limit <= 0:
        raise ValueError("limit must be positive")
    if isinstance(net, RcpspInstance):
        net = build_net(net)
    kind = HeuristicKind.parse(heuristic)
    _, _, _, trace = _python_search(net, kind, Budget(timeout=1e9), trace_limit=limit)
    return trace
