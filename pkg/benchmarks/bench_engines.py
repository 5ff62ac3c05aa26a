"""Compare the numba-compiled kernels against the pure-Python/numpy fallback.

Two measurements:

* ``bounds``  -- per-call cost of the critical-path and resource-load bounds:
  numba kernel vs. vectorised numpy twin vs. plain-Python reference, over the
  reachable states of a few random instances.
* ``search``  -- end-to-end A* wall time and expansion rate for
  (a) the compiled kernel engine, (b) the same kernel code with
  ``TTPNR_DISABLE_NUMBA=1`` (interpreted), and (c) the object-based Python
  engine. Each configuration runs in a fresh subprocess because the numba
  switch is read at import time.

Usage::

    python3 benchmarks/bench_engines.py                 # both parts, defaults
    python3 benchmarks/bench_engines.py --part search --n 12 --count 5
    python3 benchmarks/bench_engines.py --j30 tests/data/j301_1.sm --configs kernel
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

CONFIGS = {
    # name: (engine, disable numba)
    "kernel": ("kernel", False),
    "kernel-nojit": ("kernel", True),
    "python": ("python", False),
}


def _instances(args):
    from ttpnr.oracle import random_instance
    from ttpnr.psplib_io import read_sm

    if args.j30:
        return [read_sm(p) for p in args.j30]
    return [
        random_instance(args.seed + k, args.n, 2, 6, 0.6, edge_prob=args.edge_prob)
        for k in range(args.count)
    ]


def worker(args) -> None:
    """Runs inside the subprocess; prints one JSON record per instance."""
    from ttpnr.astar import Budget, solve
    from ttpnr.fixtures import example1

    engine = CONFIGS[args.worker][0]
    solve(example1(), args.heuristic, engine=engine)  # compile / load cache outside the timing
    for inst in _instances(args):
        wall = float("inf")
        for _ in range(args.repeat):  # best-of-N hides one-off costs (JIT cache loads, first clock check)
            t0 = time.perf_counter()
            out = solve(inst, args.heuristic, Budget(timeout=args.timeout), engine=engine)
            wall = min(wall, time.perf_counter() - t0)
        print(json.dumps({
            "instance": inst.name, "status": out.status, "makespan": out.makespan,
            "expanded": out.stats.expanded, "wall": wall,
        }), flush=True)


def run_search(args) -> None:
    print(f"search: heuristic={args.heuristic} timeout={args.timeout}s, best of {args.repeat} runs")
    results = {}
    for name in args.configs:
        env = dict(os.environ)
        env.pop("TTPNR_DISABLE_NUMBA", None)
        if CONFIGS[name][1]:
            env["TTPNR_DISABLE_NUMBA"] = "1"
        cmd = [sys.executable, __file__, "--worker", name] + _forward(args)
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
        if proc.returncode:
            print(proc.stderr, file=sys.stderr)
            raise SystemExit(f"worker {name} failed")
        results[name] = [json.loads(line) for line in proc.stdout.splitlines() if line.startswith("{")]

    header = f"{'instance':<22}" + "".join(f"{n:>26}" for n in args.configs)
    print(header)
    names = [r["instance"] for r in results[args.configs[0]]]
    for i, inst in enumerate(names):
        cells = []
        for n in args.configs:
            r = results[n][i]
            cells.append(f"{r['wall']:9.3f}s {r['expanded']:>9} {str(r['makespan']):>5}")
        print(f"{inst:<22}" + "".join(f"{c:>26}" for c in cells))
    print("-" * len(header))
    totals = {n: sum(r["wall"] for r in results[n]) for n in args.configs}
    rates = {n: sum(r["expanded"] for r in results[n]) / max(totals[n], 1e-9) for n in args.configs}
    print(f"{'total wall':<22}" + "".join(f"{totals[n]:>25.3f}s" for n in args.configs))
    print(f"{'expansions / s':<22}" + "".join(f"{rates[n]:>26.0f}" for n in args.configs))
    base = args.configs[0]
    for n in args.configs[1:]:
        print(f"{base} speed-up over {n}: {totals[n] / max(totals[base], 1e-9):.1f}x")
    solved_all = [i for i in range(len(names)) if all(results[n][i]["status"] == "solved" for n in args.configs)]
    agree = all(len({results[n][i]["makespan"] for n in args.configs}) == 1 for i in solved_all)
    print(f"makespans agree on {len(solved_all)} commonly solved instances: {agree}")


def _forward(args) -> list[str]:
    out = ["--n", str(args.n), "--count", str(args.count), "--seed", str(args.seed),
           "--edge-prob", str(args.edge_prob), "--heuristic", args.heuristic, "--timeout", str(args.timeout),
           "--repeat", str(args.repeat)]
    for p in args.j30 or []:
        out += ["--j30", p]
    return out


def _timeit(fn, states, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for s in states:
            fn(s)
        best = min(best, time.perf_counter() - t0)
    return best / len(states)


def run_bounds(args) -> None:
    from ttpnr.heuristics import make_heuristic
    from ttpnr.kernels import NUMBA_ENABLED, KernelData, h_cp_kernel, h_cp_numpy, h_res_kernel, h_res_numpy
    from ttpnr.net import build_net
    from ttpnr.oracle import random_instance
    from ttpnr.state import explore

    print(f"bounds: numba {'enabled' if NUMBA_ENABLED else 'DISABLED'}; time per call (best of {args.repeat})")
    print(f"{'instance':<18}{'states':>8}{'cp kernel':>12}{'cp numpy':>12}{'cp python':>12}"
          f"{'res kernel':>12}{'res numpy':>12}{'res python':>12}")
    for k in range(3):
        inst = random_instance(args.seed + k, args.n, 3, 6, 0.6, edge_prob=args.edge_prob)
        d = KernelData.from_instance(inst)
        graph = explore(build_net(inst), max_states=2000)
        py_states = [s.status for s in graph.states]
        np_states = [np.asarray(s, dtype=np.int16) for s in py_states]
        cp, res = make_heuristic(inst, "cp"), make_heuristic(inst, "res")
        h_cp_kernel(np_states[0], d.durations, d.pred_ptr, d.pred_idx, d.topo)
        h_res_kernel(np_states[0], d.durations, d.demands, d.caps)
        row = [
            _timeit(lambda s: h_cp_kernel(s, d.durations, d.pred_ptr, d.pred_idx, d.topo), np_states, args.repeat),
            _timeit(lambda s: h_cp_numpy(s, d.durations, d.pred_ptr, d.pred_idx, d.topo), np_states, args.repeat),
            _timeit(cp, py_states, args.repeat),
            _timeit(lambda s: h_res_kernel(s, d.durations, d.demands, d.caps), np_states, args.repeat),
            _timeit(lambda s: h_res_numpy(s, d.durations, d.demands, d.caps), np_states, args.repeat),
            _timeit(res, py_states, args.repeat),
        ]
        print(f"{inst.name:<18}{len(py_states):>8}" + "".join(f"{v * 1e6:>10.2f}us" for v in row))


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--part", choices=["bounds", "search", "all"], default="all")
    p.add_argument("--configs", nargs="+", choices=list(CONFIGS), default=list(CONFIGS))
    p.add_argument("--n", type=int, default=14, help="real activities per random instance")
    p.add_argument("--count", type=int, default=4, help="random instances in the search part")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edge-prob", type=float, default=0.2)
    p.add_argument("--heuristic", default="max")
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--j30", action="append", help="benchmark these .sm files instead of random instances")
    p.add_argument("--worker", choices=list(CONFIGS), help=argparse.SUPPRESS)
    args = p.parse_args(argv)
    if args.worker:
        worker(args)
        return
    if args.part in ("bounds", "all"):
        run_bounds(args)
    if args.part in ("search", "all"):
        run_search(args)


if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
    main()
