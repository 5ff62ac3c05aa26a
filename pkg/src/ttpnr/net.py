"""Timed transition Petri net with resources, built from an RCPSP instance.

Places are laid out as: source, one precedence place per edge (in the
instance's sorted edge order), sink, then one resource place per resource
type. Transition ``t`` is the activity ``t`` (the activity map is the
identity).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .instance import InstanceError, RcpspInstance, validate_instance

if TYPE_CHECKING:
    from .state import TimedState

SOURCE = "source"
SINK = "sink"
PRECEDENCE = "precedence"
RESOURCE = "resource"


@dataclass(frozen=True)
class Place:
    id: int
    kind: str
    edge: tuple[int, int] | None = None
    resource: int | None = None

    @property
    def label(self) -> str:
        if self.kind == PRECEDENCE:
            return f"p_{self.edge[0]}_{self.edge[1]}"
        if self.kind == RESOURCE:
            return f"p_r{self.resource}"
        return f"p_{self.kind}"


@dataclass(frozen=True)
class Transition:
    id: int
    activity: int
    duration: int
    inputs: tuple[tuple[int, int], ...]
    outputs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class TtpnrNet:
    instance: RcpspInstance
    places: tuple[Place, ...]
    transitions: tuple[Transition, ...]
    initial_marking: tuple[int, ...]
    capacities: tuple[int, ...]
    source_place: int
    sink_place: int
    resource_places: tuple[int, ...]
    edge_places: dict[tuple[int, int], int]

    def place_kind(self, p: int) -> str:
        return self.places[p].kind


def build_net(inst: RcpspInstance) -> TtpnrNet:
    """Encode ``inst``; raises :class:`InstanceError` if it is invalid or not dummy-closed."""
    problems = validate_instance(inst)
    if problems:
        raise InstanceError("cannot build net: " + "; ".join(problems))
    n = inst.n_activities
    sink_act = n - 1
    places: list[Place] = [Place(0, SOURCE)]
    edge_places: dict[tuple[int, int], int] = {}
    for edge in inst.precedence:
        edge_places[edge] = len(places)
        places.append(Place(len(places), PRECEDENCE, edge=edge))
    sink_place = len(places)
    places.append(Place(sink_place, SINK))
    resource_places = []
    for r in range(inst.n_resources):
        resource_places.append(len(places))
        places.append(Place(len(places), RESOURCE, resource=r))

    transitions = []
    for a in inst.activities:
        j = a.id
        ins = [(edge_places[(i, j)], 1) for i in inst.predecessors[j]]
        outs = [(edge_places[(j, s)], 1) for s in inst.successors[j]]
        if j == 0:
            ins.insert(0, (0, 1))
        if j == sink_act:
            outs.append((sink_place, 1))
        for r, u in enumerate(a.demands):
            if u > 0:
                ins.append((resource_places[r], u))
                outs.append((resource_places[r], u))
        transitions.append(Transition(j, j, a.duration, tuple(ins), tuple(outs)))

    marking = [0] * len(places)
    marking[0] = 1
    for r, p in enumerate(resource_places):
        marking[p] = inst.capacities[r]
    return TtpnrNet(
        instance=inst,
        places=tuple(places),
        transitions=tuple(transitions),
        initial_marking=tuple(marking),
        capacities=inst.capacities,
        source_place=0,
        sink_place=sink_place,
        resource_places=tuple(resource_places),
        edge_places=edge_places,
    )


def token_counts(net: TtpnrNet, state: "TimedState") -> list[int]:
    """Number of tokens per place, delayed tokens included."""
    status = state.status
    counts = [0] * len(net.places)
    counts[net.source_place] = 1 if status[0] < 0 else 0
    counts[net.sink_place] = 0 if status[-1] < 0 else 1
    for (i, j), p in net.edge_places.items():
        if status[i] >= 0 and status[j] < 0:
            counts[p] = 1
    for r, p in enumerate(net.resource_places):
        # consumed tokens are re-deposited by the same firing, so the count never drops
        counts[p] = net.capacities[r]
    return counts


def enabled_transitions(net: TtpnrNet, state: "TimedState") -> list[int]:
    """Transitions whose input places hold at least the arc weight, ignoring delays."""
    counts = token_counts(net, state)
    return [t.id for t in net.transitions if all(counts[p] >= w for p, w in t.inputs)]


def to_dot(net: TtpnrNet, names: Sequence[str] | None = None) -> str:
    """Graphviz rendering of the net structure with the initial marking."""

    def tname(j: int) -> str:
        return names[j] if names is not None else str(j)

    lines = ["digraph ttpnr {", "  rankdir=LR;"]
    for p in net.places:
        tokens = net.initial_marking[p.id]
        label = p.label if p.kind != PRECEDENCE else f"p_{tname(p.edge[0])}{tname(p.edge[1])}"
        if tokens:
            label += f"\\n{tokens}"
        shape = "doublecircle" if p.kind == RESOURCE else "circle"
        lines.append(f'  P{p.id} [shape={shape}, label="{label}"];')
    for t in net.transitions:
        lines.append(f'  T{t.id} [shape=box, label="{tname(t.activity)} ({t.duration})"];')
        for p, w in t.inputs:
            lines.append(f"  P{p} -> T{t.id}" + (f' [label="{w}"]' if w != 1 else "") + ";")
        for p, w in t.outputs:
            lines.append(f"  T{t.id} -> P{p}" + (f' [label="{w}"]' if w != 1 else "") + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"
