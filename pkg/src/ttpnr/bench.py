"""Benchmark sweeps over directories of ``.sm`` files.

Success rate is ``solved / total * 100``; the average time is taken over
solved instances only.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .astar import Budget, solve
from .heuristics import HeuristicKind
from .psplib_io import OptimumTable, PspLibParseError, read_sm

CSV_COLUMNS = (
    "instance",
    "outcome",
    "makespan",
    "wall_time_s",
    "expanded",
    "generated",
    "duplicates",
    "cache_hits",
    "heuristic",
)

ERROR = "error"


@dataclass
class BenchRecord:
    instance: str
    outcome: str
    makespan: Optional[int]
    wall_time: float
    expanded: int
    generated: int
    duplicates_pruned: int
    cache_hits: int
    heuristic: str
    message: str = ""

    def row(self) -> list:
        return [
            self.instance,
            self.outcome,
            "" if self.makespan is None else self.makespan,
            f"{self.wall_time:.4f}",
            self.expanded,
            self.generated,
            self.duplicates_pruned,
            self.cache_hits,
            self.heuristic,
        ]


@dataclass
class BenchSummary:
    total: int
    solved: int
    success_rate: float
    mean_time_solved: float
    mismatches: list[str]


def list_instances(directory: str | Path) -> list[Path]:
    return sorted(Path(directory).glob("*.sm"), key=lambda p: _natural_key(p.stem))


def _natural_key(name: str):
    import re

    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name)]


def run_one(path: str | Path, timeout: float, heuristic: str, engine: Optional[str] = None) -> BenchRecord:
    path = Path(path)
    try:
        inst = read_sm(path)
    except (OSError, PspLibParseError) as exc:
        return BenchRecord(path.stem, ERROR, None, 0.0, 0, 0, 0, 0, heuristic, str(exc))
    out = solve(inst, heuristic, Budget(timeout=timeout), engine=engine)
    st = out.stats
    return BenchRecord(
        path.stem, out.status, out.makespan, st.wall_time, st.expanded, st.generated,
        st.duplicates_pruned, st.zero_cost_cache_hits, HeuristicKind.parse(heuristic).value,
    )


def _run_packed(args):
    return run_one(*args)


def run_bench(
    paths: Sequence[str | Path],
    timeout: float = 300.0,
    heuristic: str = "max",
    jobs: int = 1,
    engine: Optional[str] = None,
) -> list[BenchRecord]:
    """Solve every instance; results come back in input order regardless of ``jobs``."""
    work = [(str(p), timeout, heuristic, engine) for p in paths]
    if jobs <= 1 or len(work) <= 1:
        return [run_one(*w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_packed, work))


def summarize(records: Iterable[BenchRecord], optima: Optional[OptimumTable] = None) -> BenchSummary:
    records = list(records)
    solved = [r for r in records if r.outcome == "solved"]
    total = len(records)
    rate = 100.0 * len(solved) / total if total else 0.0
    mean = sum(r.wall_time for r in solved) / len(solved) if solved else 0.0
    mismatches = []
    if optima is not None:
        for r in solved:
            want = optima.get(r.instance)
            if want is not None and want != r.makespan:
                mismatches.append(f"{r.instance}: got {r.makespan}, published optimum {want}")
    return BenchSummary(total, len(solved), rate, mean, mismatches)


def to_csv(records: Iterable[BenchRecord], summary: Optional[BenchSummary] = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.row())
    if summary is not None:
        buf.write(f"# total={summary.total} solved={summary.solved} "
                  f"success_rate_pct={summary.success_rate:.2f} mean_time_solved_s={summary.mean_time_solved:.4f}\n")
    return buf.getvalue()
