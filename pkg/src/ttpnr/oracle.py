"""Ground truth for small instances: a schedule validator and a brute-force optimum.

Nothing here touches the Petri-net or search code, so it can be used to check
them independently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .instance import RcpspInstance, close_dummies

DEFAULT_ORACLE_CAP = 9


class ScheduleError(ValueError):
    """Schedule is structurally unusable (e.g. a start time is missing)."""


class OracleRefused(ValueError):
    """Instance too large for exhaustive enumeration."""


@dataclass
class Schedule:
    starts: dict[int, int]
    makespan: int = field(default=-1)

    def __post_init__(self):
        self.starts = {int(j): int(s) for j, s in sorted(self.starts.items(), key=lambda kv: int(kv[0]))}
        if self.makespan < 0 and self.starts:
            self.makespan = self.starts[max(self.starts)]

    def to_json(self) -> str:
        return json.dumps(
            {"makespan": self.makespan, "starts": {str(j): self.starts[j] for j in sorted(self.starts)}},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        try:
            data = json.loads(text)
            starts = {int(j): int(s) for j, s in data["starts"].items()}
            makespan = int(data["makespan"])
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ScheduleError(f"malformed schedule JSON: {exc}") from None
        return cls(starts, makespan)


def validate_schedule(inst: RcpspInstance, sched: Schedule) -> list[str]:
    """Precedence and per-time-unit capacity check. Returns violations (empty if feasible).

    Raises :class:`ScheduleError` if an activity has no start time.
    """
    n = inst.n_activities
    missing = [j for j in range(n) if j not in sched.starts]
    if missing:
        raise ScheduleError(f"missing start time for activities {missing}")
    S = sched.starts
    out = []
    for j in range(n):
        if S[j] < 0:
            out.append(f"negative start time for {j}: {S[j]}")
    if S[0] != 0:
        out.append(f"dummy start begins at {S[0]}, expected 0")
    if sched.makespan != S[n - 1]:
        out.append(f"makespan {sched.makespan} != start of finish activity {S[n - 1]}")
    for i, j in inst.precedence:
        finish = S[i] + inst.activities[i].duration
        if S[j] < finish:
            out.append(f"precedence ({i}, {j}) violated: {j} starts at {S[j]} before {i} ends at {finish}")
    horizon = max((S[a.id] + a.duration for a in inst.activities), default=0)
    for r, cap in enumerate(inst.capacities):
        usage = [0] * max(horizon, 1)
        for a in inst.activities:
            u = a.demands[r]
            if u:
                for t in range(max(S[a.id], 0), S[a.id] + a.duration):
                    usage[t] += u
        for t, used in enumerate(usage):
            if used > cap:
                out.append(f"resource {r} over capacity at t={t}: usage {used} > {cap}")
    return out


def brute_force_optimum(inst: RcpspInstance, cap: int = DEFAULT_ORACLE_CAP) -> tuple[int, Schedule]:
    """Exact optimum by enumerating precedence-feasible activity lists.

    Each list is decoded with the serial schedule-generation scheme (earliest
    precedence- and resource-feasible start); the best active schedule found is
    optimal. Partial lists whose makespan already reaches the incumbent are cut.
    """
    n = inst.n_activities
    real = n - 2
    if real > cap:
        raise OracleRefused(f"{real} real activities exceeds the oracle cap of {cap}")
    k = inst.n_resources
    dur = [a.duration for a in inst.activities]
    dem = [a.demands for a in inst.activities]
    caps = inst.capacities
    preds = inst.predecessors
    horizon = sum(dur) + 1
    usage = [[0] * k for _ in range(horizon)]
    start = [-1] * n
    n_preds_left = [len(p) for p in preds]
    succs = inst.successors
    best = [sum(dur) + 1, None]

    def earliest(j: int) -> int:
        t = max((start[i] + dur[i] for i in preds[j]), default=0)
        if dur[j] == 0 or not any(dem[j]):
            return t
        while True:
            clash = -1
            for q in range(t, t + dur[j]):
                row = usage[q]
                if any(row[r] + dem[j][r] > caps[r] for r in range(k)):
                    clash = q
                    break
            if clash < 0:
                return t
            t = clash + 1

    def place(j: int, t: int, sign: int) -> None:
        for q in range(t, t + dur[j]):
            row = usage[q]
            for r in range(k):
                row[r] += sign * dem[j][r]

    def search(eligible: list[int], done: int, span: int) -> None:
        if span >= best[0]:
            return
        if done == n:
            best[0] = span
            best[1] = list(start)
            return
        for j in eligible:
            t = earliest(j)
            start[j] = t
            place(j, t, 1)
            nxt = [e for e in eligible if e != j]
            for s in succs[j]:
                n_preds_left[s] -= 1
                if n_preds_left[s] == 0:
                    nxt.append(s)
            search(sorted(nxt), done + 1, max(span, t + dur[j]))
            for s in succs[j]:
                n_preds_left[s] += 1
            place(j, t, -1)
            start[j] = -1

    roots = [j for j in range(n) if n_preds_left[j] == 0]
    search(roots, 0, 0)
    starts = {j: s for j, s in enumerate(best[1])}
    return best[0], Schedule(starts, starts[n - 1])


def random_instance(
    seed: int,
    n_activities: int,
    n_resources: int,
    max_duration: int,
    demand_density: float,
    edge_prob: float = 0.3,
    max_demand: int = 3,
    zero_duration_prob: float = 0.0,
) -> RcpspInstance:
    """Seeded random DAG instance with ``n_activities`` real activities, closed with dummies."""
    if n_activities < 0 or n_resources < 1 or max_duration < 1 or not 0.0 <= demand_density <= 1.0:
        raise ValueError("invalid random instance parameters")
    rng = np.random.default_rng(seed)
    n = n_activities + 2
    durations = [0] * n
    demands = [[0] * n_resources for _ in range(n)]
    for j in range(1, n - 1):
        durations[j] = int(rng.integers(1, max_duration + 1))
        if zero_duration_prob and rng.random() < zero_duration_prob:
            durations[j] = 0
        for r in range(n_resources):
            if rng.random() < demand_density:
                demands[j][r] = int(rng.integers(1, max_demand + 1))
    capacities = []
    for r in range(n_resources):
        peak = max([demands[j][r] for j in range(n)] + [1])
        capacities.append(int(rng.integers(peak, 2 * peak + 1)))
    edges = [(i, j) for i in range(1, n - 1) for j in range(i + 1, n - 1) if rng.random() < edge_prob]
    inst = RcpspInstance.from_lists(durations, demands, edges, capacities, name=f"rand_s{seed}_n{n_activities}")
    return close_dummies(inst)
