import dataclasses

import pytest

from helpers import small_instances
from ttpnr.astar import INFEASIBLE, SOLVED, TIMEOUT, Budget, expand_trace, resolve_engine, solve
from ttpnr.fixtures import dummies_only, two_parallel
from ttpnr.kernels import NUMBA_ENABLED
from ttpnr.net import build_net
from ttpnr.oracle import brute_force_optimum, validate_schedule
from ttpnr.state import canonical_key, fire, initial_state

ENGINES = ["python", "kernel"]
KINDS = ["cp", "res", "max", "zero"]


@pytest.mark.parametrize("engine", ENGINES)
def test_example1_optimum_and_schedule(ex1, engine):
    out = solve(ex1, "max", engine=engine)
    assert out.status == SOLVED
    assert out.makespan == 5
    assert out.schedule.starts == {0: 0, 1: 0, 3: 0, 2: 3, 4: 3, 5: 5}
    assert validate_schedule(ex1, out.schedule) == []
    assert out.stats.reopen_violations == 0
    assert out.engine == engine


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("engine", ENGINES)
def test_example1_every_heuristic(ex1, kind, engine):
    out = solve(ex1, kind, engine=engine)
    assert out.makespan == 5
    assert validate_schedule(ex1, out.schedule) == []


def test_engines_agree_on_stats_and_schedule():
    for inst in small_instances(20, seed0=100):
        for kind in KINDS:
            a = solve(inst, kind, engine="python")
            b = solve(inst, kind, engine="kernel")
            sa, sb = a.stats.as_dict(), b.stats.as_dict()
            sa.pop("wall_time"), sb.pop("wall_time")
            assert sa == sb, (inst.name, kind)
            assert a.schedule == b.schedule


def test_informed_bound_expands_no_more_than_zero(ex1):
    zero = solve(ex1, "zero", engine="python").stats.expanded
    best = solve(ex1, "max", engine="python").stats.expanded
    assert best <= zero
    assert (best, zero) == (7, 13)


def test_zero_cost_cache_counts(ex1):
    stats = solve(ex1, "max", engine="python").stats
    assert stats.zero_cost_cache_hits == 5
    assert stats.cache_mismatches == 0


@pytest.mark.parametrize("engine", ENGINES)
def test_debug_mode_finds_no_mismatch(engine):
    for inst in small_instances(10, seed0=300):
        out = solve(inst, "max", engine=engine, debug=True)
        assert out.stats.cache_mismatches == 0


def test_matches_oracle_on_small_instances():
    for inst in small_instances(30, seed0=7):
        want, _ = brute_force_optimum(inst)
        for kind in KINDS:
            out = solve(inst, kind, engine="python")
            assert out.makespan == want, (inst.name, kind)
            assert validate_schedule(inst, out.schedule) == []


@pytest.mark.parametrize("engine", ENGINES)
def test_trivial_instances(engine):
    assert solve(dummies_only(), engine=engine).makespan == 0
    assert solve(two_parallel(2), engine=engine).makespan == 1
    assert solve(two_parallel(1), engine=engine).makespan == 2


def test_starved_resource_is_infeasible(ex1):
    net = build_net(ex1)
    starved = dataclasses.replace(net, capacities=(0,))
    out = solve(starved, "max", engine="python")
    assert out.status == INFEASIBLE
    assert out.schedule is None and out.makespan is None


@pytest.mark.parametrize("engine", ENGINES)
def test_node_limit_reports_timeout(ex1, engine):
    out = solve(ex1, "zero", Budget(node_limit=2), engine=engine)
    assert out.status == TIMEOUT
    assert out.schedule is None
    assert out.stats.expanded == 2


def test_budget_rejects_nonpositive_timeout():
    with pytest.raises(ValueError):
        Budget(timeout=0)


def test_deterministic_repeat(ex1):
    runs = [solve(ex1, "max", engine="python") for _ in range(3)]
    assert len({r.schedule.to_json() for r in runs}) == 1
    assert len({r.stats.expanded for r in runs}) == 1


def test_trace_example1(ex1):
    trace = expand_trace(ex1, "max", limit=50)
    assert [(g, h, f) for _, g, h, f in trace] == [(0, 5, 5)] * 4 + [(3, 2, 5)] * 2 + [(5, 0, 5)]
    fs = [f for *_, f in trace]
    assert fs == sorted(fs)
    assert trace[0][0] == canonical_key(initial_state(build_net(ex1)))


def test_trace_limit(ex1):
    assert len(expand_trace(ex1, "max", limit=1)) == 1
    with pytest.raises(ValueError):
        expand_trace(ex1, "max", limit=0)


def test_trace_f_monotone_on_random():
    for inst in small_instances(10, seed0=50):
        fs = [f for *_, f in expand_trace(inst, "max", limit=10_000)]
        assert all(a <= b for a, b in zip(fs, fs[1:]))


def test_schedule_replays_through_net(ex1):
    net = build_net(ex1)
    out = solve(net, "max", engine="python")
    order = sorted(out.schedule.starts, key=lambda j: (out.schedule.starts[j], j))
    s, g = initial_state(net), 0
    for t in order:
        r = fire(net, s, t)
        s, g = r.next, g + r.delta
        assert g == out.schedule.starts[t]


def test_resolve_engine():
    assert resolve_engine("python") == "python"
    assert resolve_engine(None) == ("kernel" if NUMBA_ENABLED else "python")
    with pytest.raises(ValueError):
        resolve_engine("gpu")


def test_numba_disabled_fallback_matches():
    import json
    import os
    import subprocess
    import sys

    code = (
        "import json; from ttpnr.kernels import NUMBA_ENABLED; from ttpnr.astar import solve, resolve_engine;"
        "from ttpnr.fixtures import example1; o = solve(example1(), 'max', engine='kernel');"
        "print(json.dumps([NUMBA_ENABLED, resolve_engine(None), o.makespan, o.stats.expanded, o.schedule.starts]))"
    )
    env = dict(os.environ, TTPNR_DISABLE_NUMBA="1")
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    enabled, auto, makespan, expanded, starts = json.loads(proc.stdout)
    assert enabled is False and auto == "python"
    assert makespan == 5 and expanded == 7
    assert {int(k): v for k, v in starts.items()} == {0: 0, 1: 0, 3: 0, 2: 3, 4: 3, 5: 5}
