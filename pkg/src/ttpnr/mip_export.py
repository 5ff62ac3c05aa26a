"""Time-indexed MIP model (binary start variables) and LP-format writer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .instance import RcpspInstance
from .oracle import Schedule

Var = tuple[int, int]  # (activity, start time)


@dataclass(frozen=True)
class Row:
    name: str
    kind: str  # "assign" | "prec" | "cap"
    terms: tuple[tuple[int, Var], ...]
    sense: str  # "=" or "<="
    rhs: int


@dataclass
class TimeIndexedModel:
    horizon: int
    n_activities: int
    objective: list[tuple[int, Var]] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)

    @property
    def variables(self) -> list[Var]:
        return [(j, t) for j in range(self.n_activities) for t in range(self.horizon + 1)]

    def rows_of(self, kind: str) -> list[Row]:
        return [r for r in self.rows if r.kind == kind]


def var_name(v: Var) -> str:
    return f"x_{v[0]}_{v[1]}"


def build_model(inst: RcpspInstance) -> TimeIndexedModel:
    """Objective = start of the finish dummy; one start per activity;
    source finishes before target starts for every edge; per-(resource, time)
    capacity over the activities running at that time."""
    T = sum(a.duration for a in inst.activities)
    H = range(T + 1)
    n = inst.n_activities
    model = TimeIndexedModel(horizon=T, n_activities=n)
    model.objective = [(t, (n - 1, t)) for t in H if t]

    for j in range(n):
        model.rows.append(Row(f"assign_{j}", "assign", tuple((1, (j, t)) for t in H), "=", 1))
    for i, j in inst.precedence:
        terms = [(t, (i, t)) for t in H if t] + [(-t, (j, t)) for t in H if t]
        model.rows.append(Row(f"prec_{i}_{j}", "prec", tuple(terms), "<=", -inst.activities[i].duration))
    for r, cap in enumerate(inst.capacities):
        for t in H:
            terms = []
            for a in inst.activities:
                u = a.demands[r]
                if u and a.duration:
                    for q in range(max(0, t - a.duration + 1), t + 1):
                        terms.append((u, (a.id, q)))
            model.rows.append(Row(f"cap_{r}_{t}", "cap", tuple(terms), "<=", cap))
    return model


def _expr(terms, per_line: int = 8) -> list[str]:
    if not terms:
        return ["0 x_0_0"]
    chunks = []
    for k in range(0, len(terms), per_line):
        part = []
        for idx, (c, v) in enumerate(terms[k : k + per_line]):
            sign = "-" if c < 0 else "+"
            if k == 0 and idx == 0:
                part.append(f"{'-' if c < 0 else ''}{abs(c)} {var_name(v)}")
            else:
                part.append(f"{sign} {abs(c)} {var_name(v)}")
        chunks.append(" ".join(part))
    return chunks


def write_lp(model: TimeIndexedModel, name: str = "rcpsp") -> str:
    """Deterministic LP-format text (Minimize / Subject To / Binary / End)."""
    out = [f"\\ time-indexed RCPSP model {name}", "Minimize"]
    obj = _expr(model.objective)
    out.append(" obj: " + obj[0])
    out += ["   " + line for line in obj[1:]]
    out.append("Subject To")
    for row in model.rows:
        lines = _expr(row.terms)
        op = "=" if row.sense == "=" else "<="
        if len(lines) == 1:
            out.append(f" {row.name}: {lines[0]} {op} {row.rhs}")
        else:
            out.append(f" {row.name}: {lines[0]}")
            out += ["   " + line for line in lines[1:-1]]
            out.append(f"   {lines[-1]} {op} {row.rhs}")
    out.append("Binary")
    names = [var_name(v) for v in model.variables]
    for k in range(0, len(names), 10):
        out.append(" " + " ".join(names[k : k + 10]))
    out.append("End")
    return "\n".join(out) + "\n"


def assignment_from_schedule(model: TimeIndexedModel, sched: Schedule) -> dict[Var, int]:
    x = {v: 0 for v in model.variables}
    for j, s in sched.starts.items():
        if (j, s) not in x:
            raise ValueError(f"start {s} of activity {j} lies outside the horizon 0..{model.horizon}")
        x[(j, s)] = 1
    return x


def violated_rows(model: TimeIndexedModel, x: Mapping[Var, int]) -> list[str]:
    """Names of rows not satisfied by the 0/1 assignment ``x`` (missing variables count as 0)."""
    bad = []
    for row in model.rows:
        lhs = sum(c * x.get(v, 0) for c, v in row.terms)
        ok = lhs == row.rhs if row.sense == "=" else lhs <= row.rhs
        if not ok:
            bad.append(row.name)
    return bad


def objective_value(model: TimeIndexedModel, x: Mapping[Var, int]) -> int:
    return sum(c * x.get(v, 0) for c, v in model.objective)
