"""Omega-reachability graph for structural verification.

Markings are boolean: a place is either unmarked or holds omega (stands for
"some positive truth").  Every step fires the whole set of enabled
transitions that have not fired yet, so each transition fires at most once
and the graph is a path, possibly ending in a self-loop when a step
reproduces its predecessor marking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Iterable, Iterator

from .fpn import FuzzyPetriNet, _quote
from .rulebase import BehaviorModel, VariableKind


@dataclass(frozen=True)
class Marking:
    entries: tuple[bool, ...]

    @classmethod
    def from_marked(cls, size: int, marked: Iterable[int]) -> Marking:
        marked = set(marked)
        return cls(tuple(i in marked for i in range(size)))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> bool:
        return self.entries[index]

    def __iter__(self) -> Iterator[bool]:
        return iter(self.entries)

    @property
    def marked(self) -> frozenset[int]:
        return frozenset(i for i, e in enumerate(self.entries) if e)

    @property
    def omega_count(self) -> int:
        return sum(self.entries)

    def covers(self, other: Marking) -> bool:
        return self.marked >= other.marked

    def __str__(self) -> str:
        return "(" + ", ".join("ω" if e else "0" for e in self.entries) + ")"


@dataclass(frozen=True)
class Edge:
    source: int
    fired: frozenset[int]
    target: int


@dataclass(frozen=True)
class ReachabilityGraph:
    nodes: tuple[Marking, ...]
    edges: tuple[Edge, ...]
    fired: frozenset[int]
    no_effect_firings: frozenset[int]

    @property
    def has_loop(self) -> bool:
        return any(e.source == e.target for e in self.edges)

    @property
    def final(self) -> Marking:
        return self.nodes[-1]

    @property
    def steps(self) -> list[frozenset[int]]:
        return [e.fired for e in self.edges]


def initial_marking(net: FuzzyPetriNet, model: BehaviorModel) -> Marking:
    """Mark every place whose variable is an input property."""
    return Marking(tuple(model.kind_of(p.proposition.variable) is VariableKind.INPUT
                         for p in net.places))


def enabled_transitions(net: FuzzyPetriNet, m: Marking, already_fired: AbstractSet[int]) -> set[int]:
    return {t.index for t in net.transitions
            if t.index not in already_fired and all(m[p] for p in t.inputs)}


def _no_effect(net: FuzzyPetriNet, before: frozenset[int], step: set[int]) -> set[int]:
    # a firing is idle if some serialization of the step leaves it nothing new to mark
    idle = set()
    for t in step:
        outputs = net.transitions[t].outputs
        if not outputs:
            continue
        others = set(before)
        for u in step - {t}:
            others.update(net.transitions[u].outputs)
        if others.issuperset(outputs):
            idle.add(t)
    return idle


def build_reachability_graph(net: FuzzyPetriNet, root: Marking) -> ReachabilityGraph:
    if len(root) != len(net.places):
        raise ValueError(
            f"root marking has {len(root)} entries but the net has {len(net.places)} places")
    nodes = [root]
    edges: list[Edge] = []
    fired: set[int] = set()
    idle: set[int] = set()
    while True:
        current = nodes[-1]
        step = enabled_transitions(net, current, fired)
        if not step:
            break
        fired |= step
        before = current.marked
        idle |= _no_effect(net, before, step)
        after = set(before)
        for t in step:
            after.update(net.transitions[t].outputs)
        here = len(nodes) - 1
        if after == before:
            edges.append(Edge(here, frozenset(step), here))
            break
        nodes.append(Marking.from_marked(len(root), after))
        edges.append(Edge(here, frozenset(step), here + 1))
    return ReachabilityGraph(tuple(nodes), tuple(edges), frozenset(fired), frozenset(idle))


def graph_to_dot(graph: ReachabilityGraph, net: FuzzyPetriNet) -> str:
    """Nodes list their omega places; edges list the fired rules."""
    lines = [f"digraph {_quote((net.model_ref or 'fpn') + ' reachability')} {{"]
    for i, node in enumerate(graph.nodes):
        marked = ",".join(f"P{p}" for p in sorted(node.marked)) or "∅"
        lines.append(f"  m{i} [shape=box, label={_quote(f'M{i}: ω at {marked}')}];")
    for e in graph.edges:
        rules = ",".join(net.transitions[t].source_rule for t in sorted(e.fired))
        style = ", style=bold" if e.fired & graph.no_effect_firings else ""
        lines.append(f"  m{e.source} -> m{e.target} [label={_quote(rules)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
