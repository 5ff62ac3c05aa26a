"""Reading and writing PSPLIB single-mode ``.sm`` files and optimum tables."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterator

from .instance import Activity, RcpspInstance, validate_instance

OptimumTable = dict[str, int]

_STARS = re.compile(r"^\s*\*{5,}\s*$")
_DASHES = re.compile(r"^\s*-{5,}\s*$")


class PspLibParseError(ValueError):
    def __init__(self, line: int, reason: str, source: str = ""):
        self.line = line
        self.reason = reason
        self.source = source
        where = f"{source}:" if source else "line "
        super().__init__(f"{where}{line}: {reason}")


def _ints(text: str, lineno: int, source: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise PspLibParseError(lineno, f"malformed row {text.strip()!r}", source) from None


def _header_value(line: str) -> str:
    return line.split(":", 1)[1] if ":" in line else ""


def _section_rows(lines: list[str], start: int) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, text) for the body of a section until the next star rule."""
    for idx in range(start, len(lines)):
        text = lines[idx]
        if _STARS.match(text):
            return
        if not text.strip() or _DASHES.match(text):
            continue
        yield idx + 1, text


def _data_rows(lines: list[str], start: int) -> Iterator[tuple[int, str]]:
    """Section body without its column-header lines (text rows before the first numeric row)."""
    seen_data = False
    for lineno, text in _section_rows(lines, start):
        if not seen_data and any(ch.isalpha() for ch in text):
            continue
        seen_data = True
        yield lineno, text


def parse_sm(text: str, name: str = "", source: str = "") -> RcpspInstance:
    """Parse a single-mode PSPLIB file into an instance with 0-based activity ids.

    Raises :class:`PspLibParseError` with the offending line number on any problem.
    """
    lines = text.splitlines()
    n_jobs = None
    n_renewable = None
    extra_resources = 0
    sections: dict[str, int] = {}
    for idx, line in enumerate(lines):
        low = line.strip().lower()
        if low.startswith("jobs"):
            vals = _header_value(line).split()
            if not vals:
                raise PspLibParseError(idx + 1, "job count missing", source)
            n_jobs = _ints(vals[0], idx + 1, source)[0]
        elif low.startswith("- renewable"):
            n_renewable = _ints(_header_value(line).split()[0], idx + 1, source)[0]
        elif low.startswith("- nonrenewable") or low.startswith("- doubly"):
            if _ints(_header_value(line).split()[0], idx + 1, source)[0] and not extra_resources:
                extra_resources = idx + 1
        else:
            for key in ("precedence relations", "requests/durations", "resourceavailabilities"):
                if low.startswith(key):
                    sections[key] = idx + 1
    if n_jobs is None:
        raise PspLibParseError(0, "missing 'jobs (incl. supersource/sink)' header", source)
    if n_renewable is None:
        raise PspLibParseError(0, "missing renewable resource count", source)
    k = n_renewable

    def require(key: str) -> int:
        if key not in sections:
            raise PspLibParseError(0, f"missing section {key.upper()}", source)
        return sections[key]

    succs: dict[int, list[int]] = {}
    last_line = require("precedence relations")
    for lineno, row in _data_rows(lines, last_line):
        last_line = lineno
        vals = _ints(row, lineno, source)
        if len(vals) < 3:
            raise PspLibParseError(lineno, "malformed precedence row", source)
        job, modes, n_succ = vals[:3]
        if modes != 1:
            raise PspLibParseError(lineno, f"multi-mode unsupported (job {job} has {modes} modes)", source)
        if len(vals) != 3 + n_succ:
            raise PspLibParseError(lineno, f"job {job} declares {n_succ} successors, lists {len(vals) - 3}", source)
        if job in succs:
            raise PspLibParseError(lineno, f"duplicate job {job}", source)
        succs[job] = vals[3:]
    if len(succs) != n_jobs:
        raise PspLibParseError(last_line, f"job count mismatch: header says {n_jobs}, precedence table has {len(succs)}", source)

    if extra_resources:
        raise PspLibParseError(extra_resources, "only renewable resources are supported", source)

    durations: dict[int, int] = {}
    demands: dict[int, tuple[int, ...]] = {}
    last_line = require("requests/durations")
    for lineno, row in _data_rows(lines, last_line):
        last_line = lineno
        vals = _ints(row, lineno, source)
        if len(vals) != 3 + k:
            raise PspLibParseError(lineno, f"expected {3 + k} columns in request row, got {len(vals)}", source)
        job, mode, dur = vals[:3]
        if mode != 1:
            raise PspLibParseError(lineno, f"multi-mode unsupported (job {job} mode {mode})", source)
        if job in durations:
            raise PspLibParseError(lineno, f"duplicate request row for job {job}", source)
        durations[job] = dur
        demands[job] = tuple(vals[3:])
    if len(durations) != n_jobs:
        raise PspLibParseError(last_line, f"job count mismatch: header says {n_jobs}, request table has {len(durations)}", source)

    capacities = None
    avail_line = require("resourceavailabilities")
    for lineno, row in _data_rows(lines, avail_line):
        avail_line = lineno
        capacities = _ints(row, lineno, source)
        break
    if capacities is None:
        capacities = []
    if len(capacities) != k:
        raise PspLibParseError(avail_line, f"expected {k} resource availabilities, got {len(capacities)}", source)

    jobs = sorted(succs)
    if jobs != list(range(1, n_jobs + 1)) or sorted(durations) != jobs:
        raise PspLibParseError(0, "job numbers must be 1..N in both tables", source)
    edges = []
    for job in jobs:
        for s in succs[job]:
            if not 1 <= s <= n_jobs:
                raise PspLibParseError(0, f"job {job} lists unknown successor {s}", source)
            edges.append((job - 1, s - 1))
    acts = tuple(Activity(job - 1, durations[job], demands[job]) for job in jobs)
    inst = RcpspInstance(acts, tuple(edges), tuple(capacities), name)
    problems = validate_instance(inst)
    if problems:
        raise PspLibParseError(0, "invalid instance: " + "; ".join(problems), source)
    return inst


def read_sm(path: str | Path) -> RcpspInstance:
    path = Path(path)
    return parse_sm(path.read_text(), name=path.stem, source=str(path))


def write_sm(inst: RcpspInstance) -> str:
    """Serialize to the PSPLIB single-mode layout; ``parse_sm`` reads it back unchanged."""
    n = inst.n_activities
    k = inst.n_resources
    horizon = sum(a.duration for a in inst.activities)
    rule = "*" * 72
    res_header = "".join(f"  R{r + 1:2d}" for r in range(k))
    out = [
        rule,
        f"file with basedata            : {inst.name or 'generated'}",
        "initial value random generator: 0",
        rule,
        "projects                      :  1",
        f"jobs (incl. supersource/sink ):  {n}",
        f"horizon                       :  {horizon}",
        "RESOURCES",
        f"  - renewable                 :  {k}   R",
        "  - nonrenewable              :  0   N",
        "  - doubly constrained        :  0   D",
        rule,
        "PROJECT INFORMATION:",
        "pronr.  #jobs rel.date duedate tardcost  MPM-Time",
        f"    1  {n - 2:5d}      0  {horizon:6d}        0  {horizon:6d}",
        rule,
        "PRECEDENCE RELATIONS:",
        "jobnr.    #modes  #successors   successors",
    ]
    for j in range(n):
        succ = sorted(inst.successors[j])
        tail = "".join(f"  {s + 1:3d}" for s in succ)
        out.append(f"  {j + 1:3d}        1  {len(succ):9d}   {tail}".rstrip())
    out += [
        rule,
        "REQUESTS/DURATIONS:",
        "jobnr. mode duration" + res_header,
        "-" * 72,
    ]
    for a in inst.activities:
        cols = "".join(f"  {u:3d}" for u in a.demands)
        out.append(f"  {a.id + 1:3d}      1  {a.duration:5d}{cols}")
    out += [
        rule,
        "RESOURCEAVAILABILITIES:",
        res_header,
        "".join(f"  {c:3d}" for c in inst.capacities),
        rule,
    ]
    return "\n".join(out) + "\n"


def parse_optima(text: str, prefix: str = "j30", source: str = "") -> OptimumTable:
    """Read a PSPLIB optimum listing: rows of ``group instance makespan [cpu-time]``.

    Lines not starting with an integer (titles, column headers, rules) are skipped.
    """
    table: OptimumTable = {}
    for idx, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks or not toks[0].lstrip("-").isdigit():
            continue
        if len(toks) < 3:
            raise PspLibParseError(idx, f"malformed optimum row {line.strip()!r}", source)
        try:
            group, number, makespan = int(toks[0]), int(toks[1]), int(toks[2])
        except ValueError:
            raise PspLibParseError(idx, f"malformed optimum row {line.strip()!r}", source) from None
        if makespan <= 0:
            raise PspLibParseError(idx, f"non-positive makespan {makespan}", source)
        key = f"{prefix}{group}_{number}"
        if key in table:
            raise PspLibParseError(idx, f"duplicate entry {key}", source)
        table[key] = makespan
    return table
