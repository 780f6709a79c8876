"""Fuzzy Petri net built from a normalized rule base.

Places stand for propositions, transitions for Horn clauses.  The truth
degrees attached to places at reasoning time live in
:mod:`fpnvv.inference`; the net itself is pure structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

from .rulebase import BehaviorModel, HornClause, Proposition, VariableKind

if TYPE_CHECKING:
    from .reachability import Marking

_GROUP_ORDER = (VariableKind.INPUT, VariableKind.INTERNAL, VariableKind.OUTPUT)


@dataclass(frozen=True)
class Place:
    index: int
    proposition: Proposition

    @property
    def label(self) -> str:
        return str(self.proposition)


@dataclass(frozen=True)
class Transition:
    index: int
    source_rule: str
    cf: float
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]


@dataclass(frozen=True)
class FuzzyPetriNet:
    places: tuple[Place, ...]
    transitions: tuple[Transition, ...]
    model_ref: str = ""
    _index: dict[Proposition, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for i, place in enumerate(self.places):
            if place.index != i:
                raise ValueError(f"place {place.label} has index {place.index}, expected {i}")
            if place.proposition in index:
                raise ValueError(f"two places hold {place.label}")
            index[place.proposition] = i
        object.__setattr__(self, "_index", index)
        for t in self.transitions:
            for p in t.inputs + t.outputs:
                if not 0 <= p < len(self.places):
                    raise ValueError(f"transition t{t.index} references missing place {p}")

    def index_of(self, prop: Proposition) -> int:
        return self._index[prop]

    def has_place(self, prop: Proposition) -> bool:
        return prop in self._index

    def twin(self, index: int) -> int | None:
        """Place holding the negation of place ``index``, if the net has one."""
        return self._index.get(self.places[index].proposition.negate())

    def label(self, index: int) -> str:
        return self.places[index].label

    def producers(self, index: int) -> list[Transition]:
        return [t for t in self.transitions if index in t.outputs]

    def consumers(self, index: int) -> list[Transition]:
        return [t for t in self.transitions if index in t.inputs]


def _place_order(clauses: Sequence[HornClause], model: BehaviorModel) -> list[Proposition]:
    # group by kind, then variable declaration order, then first use
    first_use: dict[Proposition, int] = {}
    for clause in clauses:
        for prop in clause.propositions:
            first_use.setdefault(prop, len(first_use))
    declared = {v.id: i for i, v in enumerate(model.variables)}
    group = {kind: i for i, kind in enumerate(_GROUP_ORDER)}

    def key(prop: Proposition):
        return (group[model.kind_of(prop.variable)], declared[prop.variable], first_use[prop])

    return sorted(first_use, key=key)


def build_fpn(clauses: Sequence[HornClause], model: BehaviorModel) -> FuzzyPetriNet:
    """One place per distinct proposition, one transition per clause.

    Places come input properties first, then internal, then output.
    """
    places = tuple(Place(i, p) for i, p in enumerate(_place_order(clauses, model)))
    index = {p.proposition: p.index for p in places}
    transitions = tuple(
        Transition(
            index=i,
            source_rule=c.source_rule,
            cf=c.cf,
            inputs=tuple(index[a] for a in c.antecedents),
            outputs=(index[c.consequent],) if c.consequent is not None else (),
        )
        for i, c in enumerate(clauses)
    )
    return FuzzyPetriNet(places, transitions, model.name)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(net: FuzzyPetriNet, marking: Marking | None = None) -> str:
    """Graphviz rendering; marked places are filled and tagged with an omega."""
    if marking is not None and len(marking) != len(net.places):
        raise ValueError(
            f"marking has {len(marking)} entries but the net has {len(net.places)} places")
    lines = [f"digraph {_quote(net.model_ref or 'fpn')} {{", "  rankdir=LR;"]
    for place in net.places:
        attrs = [f"shape=circle", f"label={_quote(place.label)}"]
        if marking is not None and marking[place.index]:
            attrs += ["style=filled", 'fillcolor="lightgray"', 'xlabel="ω"']
        lines.append(f"  p{place.index} [{', '.join(attrs)}];")
    for t in net.transitions:
        lines.append(f"  t{t.index} [shape=box, label={_quote(f'{t.source_rule} / {t.cf:g}')}];")
    for t in net.transitions:
        lines.extend(f"  p{p} -> t{t.index};" for p in t.inputs)
        lines.extend(f"  t{t.index} -> p{p};" for p in t.outputs)
    lines.append("}")
    return "\n".join(lines) + "\n"
