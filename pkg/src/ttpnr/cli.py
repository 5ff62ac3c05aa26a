"""Command-line interface.

Exit codes:
  0  success (solved / feasible / written)
  1  usage, I/O or parse error
  2  search timed out
  3  instance infeasible (open list exhausted)
  4  schedule violates precedence or capacity
  5  oracle refused (instance above the enumeration cap)
  6  benchmark makespan differs from the supplied optimum table
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .astar import INFEASIBLE, SOLVED, TIMEOUT, Budget, expand_trace, solve
from .bench import list_instances, run_bench, summarize, to_csv
from .heuristics import HeuristicKind
from .instance import InstanceError
from .mip_export import build_model, write_lp
from .net import build_net, to_dot
from .oracle import DEFAULT_ORACLE_CAP, OracleRefused, Schedule, ScheduleError, brute_force_optimum, validate_schedule
from .psplib_io import PspLibParseError, parse_optima, read_sm

EXIT_OK, EXIT_ERROR, EXIT_TIMEOUT, EXIT_INFEASIBLE, EXIT_VIOLATION, EXIT_REFUSED, EXIT_MISMATCH = range(7)

HEURISTICS = [k.value for k in HeuristicKind]


def _load(path: str):
    try:
        return read_sm(path)
    except FileNotFoundError:
        raise SystemExit(_fail(f"no such file: {path}"))
    except (OSError, PspLibParseError, InstanceError) as exc:
        raise SystemExit(_fail(str(exc)))


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_ERROR


def cmd_solve(args) -> int:
    inst = _load(args.path)
    out = solve(inst, args.heuristic, Budget(timeout=args.timeout), engine=args.engine)
    stats = out.stats.as_dict()
    if out.status == SOLVED:
        print(f"makespan {out.makespan}")
    else:
        print(out.status)
    print(json.dumps(stats, sort_keys=True))
    if out.status == SOLVED and args.out:
        Path(args.out).write_text(out.schedule.to_json() + "\n")
    return {SOLVED: EXIT_OK, TIMEOUT: EXIT_TIMEOUT, INFEASIBLE: EXIT_INFEASIBLE}[out.status]


def cmd_bench(args) -> int:
    paths = list_instances(args.dir)
    if not paths:
        return _fail(f"no .sm files in {args.dir}")
    optima = None
    if args.optima:
        try:
            optima = parse_optima(Path(args.optima).read_text(), prefix=args.prefix, source=args.optima)
        except (OSError, PspLibParseError) as exc:
            return _fail(str(exc))
    records = run_bench(paths, args.timeout, args.heuristic, args.jobs, args.engine)
    summary = summarize(records, optima)
    text = to_csv(records, summary)
    if args.csv:
        Path(args.csv).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"success rate {summary.success_rate:.2f}% ({summary.solved}/{summary.total}), "
          f"mean time over solved {summary.mean_time_solved:.3f} s", file=sys.stderr)
    for m in summary.mismatches:
        print(f"MISMATCH {m}", file=sys.stderr)
    return EXIT_MISMATCH if summary.mismatches else EXIT_OK


def cmd_export_mip(args) -> int:
    inst = _load(args.path)
    text = write_lp(build_model(inst), name=inst.name or "rcpsp")
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _load(args.path)
    try:
        sched = Schedule.from_json(Path(args.schedule).read_text())
        problems = validate_schedule(inst, sched)
    except (OSError, ScheduleError) as exc:
        return _fail(str(exc))
    if problems:
        for p in problems:
            print(p)
        return EXIT_VIOLATION
    print("feasible")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.path)
    try:
        best, witness = brute_force_optimum(inst, cap=args.cap)
    except OracleRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    print(f"optimum {best}")
    if args.out:
        Path(args.out).write_text(witness.to_json() + "\n")
    return EXIT_OK


def cmd_trace(args) -> int:
    inst = _load(args.path)
    for key, g, h, f in expand_trace(build_net(inst), args.heuristic, args.limit):
        print(f"g={g} h={h} f={f} key={key.hex()}")
    return EXIT_OK


def cmd_dot(args) -> int:
    inst = _load(args.path)
    sys.stdout.write(to_dot(build_net(inst)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ttpnr", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def search_opts(sp, timeout=True):
        sp.add_argument("--heuristic", choices=HEURISTICS, default="max")
        if timeout:
            sp.add_argument("--timeout", type=float, default=300.0, help="seconds per instance (default 300)")
        sp.add_argument("--engine", choices=["auto", "python", "kernel"], default="auto",
                        help="search implementation; auto = compiled kernel when numba is active")

    sp = sub.add_parser("solve", help="solve one .sm instance")
    sp.add_argument("path")
    search_opts(sp)
    sp.add_argument("--out", help="write the schedule JSON here")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("bench", help="solve every .sm file in a directory",
                        description="Writes one CSV row per instance. Success rate = solved/total*100; "
                                    "mean time is averaged over solved instances only.")
    sp.add_argument("dir")
    search_opts(sp)
    sp.add_argument("--csv", help="CSV output path (default stdout)")
    sp.add_argument("--optima", help="PSPLIB optimum table to check solved makespans against")
    sp.add_argument("--prefix", default="j30", help="instance-name prefix used for optimum table keys")
    sp.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("export-mip", help="write the time-indexed MIP model in LP format")
    sp.add_argument("path")
    sp.add_argument("--out", help="LP file path (default stdout)")
    sp.set_defaults(func=cmd_export_mip)

    sp = sub.add_parser("validate", help="check a schedule JSON against an instance")
    sp.add_argument("path")
    sp.add_argument("schedule")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("oracle", help="brute-force optimum for small instances")
    sp.add_argument("path")
    sp.add_argument("--cap", type=int, default=DEFAULT_ORACLE_CAP, help="max real activities")
    sp.add_argument("--out", help="write the witness schedule JSON here")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("trace", help="print the first A* expansions")
    sp.add_argument("path")
    sp.add_argument("--heuristic", choices=HEURISTICS, default="max")
    sp.add_argument("--limit", type=int, default=20)
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("dot", help="Graphviz rendering of the net")
    sp.add_argument("path")
    sp.set_defaults(func=cmd_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code)


def main_exit() -> None:
    """Console-script entry point: exit with :func:`main`'s status code."""
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
