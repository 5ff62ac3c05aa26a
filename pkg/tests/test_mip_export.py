import re

import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, milp

from helpers import small_instances
from ttpnr.mip_export import (
    assignment_from_schedule,
    build_model,
    objective_value,
    violated_rows,
    write_lp,
)
from ttpnr.oracle import Schedule, brute_force_optimum

OPT_STARTS = {0: 0, 1: 0, 3: 0, 2: 3, 4: 3, 5: 5}

TERM = re.compile(r"([+-]?)\s*(\d+)\s+(x_\d+_\d+)")


def parse_lp(text):
    """Minimal reader for the subset of LP format the exporter writes."""
    section, obj, rows, binaries = None, {}, [], []
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        if line in ("Minimize", "Subject To", "Binary", "End"):
            section = line
            continue
        if section == "Binary":
            binaries += line.split()
            continue
        if ":" in line:
            name, line = line.split(":", 1)
            current = {"name": name.strip(), "terms": {}, "sense": None, "rhs": None}
            (obj.setdefault("rows", []) if section == "Minimize" else rows).append(current)
        m = re.search(r"(<=|>=|=)\s*(-?\d+)\s*$", line)
        if m:
            current["sense"], current["rhs"] = m.group(1), int(m.group(2))
            line = line[: m.start()]
        for sign, coef, var in TERM.findall(line):
            c = int(coef) * (-1 if sign == "-" else 1)
            current["terms"][var] = current["terms"].get(var, 0) + c
    return obj["rows"][0]["terms"], rows, binaries


def solve_lp_text(text):
    objective, rows, binaries = parse_lp(text)
    col = {v: k for k, v in enumerate(binaries)}
    c = np.zeros(len(binaries))
    for v, a in objective.items():
        c[col[v]] = a
    A = np.zeros((len(rows), len(binaries)))
    lo, hi = np.empty(len(rows)), np.empty(len(rows))
    for i, row in enumerate(rows):
        for v, a in row["terms"].items():
            A[i, col[v]] = a
        lo[i] = row["rhs"] if row["sense"] == "=" else -np.inf
        hi[i] = row["rhs"]
    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=np.ones(len(c)), bounds=Bounds(0, 1))
    assert res.success
    return round(res.fun)


def test_example1_counts(ex1):
    model = build_model(ex1)
    assert model.horizon == 9
    assert len(model.variables) == 60
    assert len(model.rows_of("assign")) == 6
    assert len(model.rows_of("prec")) == 6
    assert len(model.rows_of("cap")) == 10


def test_optimal_schedule_satisfies_all_rows(ex1):
    model = build_model(ex1)
    x = assignment_from_schedule(model, Schedule(OPT_STARTS, 5))
    assert violated_rows(model, x) == []
    assert objective_value(model, x) == 5


def test_capacity_violation_fails_rows(ex1):
    model = build_model(ex1)
    starts = {0: 0, 1: 0, 2: 3, 3: 0, 4: 0, 5: 4}
    bad = violated_rows(model, assignment_from_schedule(model, Schedule(starts, 4)))
    # b, d, e together at t=0 overload capacity 2 (and e also starts before d ends)
    assert "cap_0_0" in bad and "cap_0_1" in bad


def test_precedence_violation_fails_rows(ex1):
    model = build_model(ex1)
    starts = {**OPT_STARTS, 2: 2}
    assert "prec_1_2" in violated_rows(model, assignment_from_schedule(model, Schedule(starts, 5)))


def test_assignment_outside_horizon(ex1):
    with pytest.raises(ValueError):
        assignment_from_schedule(build_model(ex1), Schedule({0: 0, 5: 99}, 99))


def test_lp_text_is_deterministic(ex1):
    a = write_lp(build_model(ex1), "example1")
    b = write_lp(build_model(ex1), "example1")
    assert a == b
    assert a.splitlines()[1] == "Minimize"
    assert a.rstrip().endswith("End")
    _, rows, binaries = parse_lp(a)
    assert len(binaries) == 60 and len(rows) == 22


def test_lp_text_solves_to_example1_optimum(ex1):
    assert solve_lp_text(write_lp(build_model(ex1))) == 5


@pytest.mark.parametrize("inst", small_instances(6, seed0=40), ids=lambda i: i.name)
def test_lp_text_solves_to_oracle_optimum(inst):
    want, witness = brute_force_optimum(inst)
    model = build_model(inst)
    assert violated_rows(model, assignment_from_schedule(model, witness)) == []
    assert solve_lp_text(write_lp(model)) == want
