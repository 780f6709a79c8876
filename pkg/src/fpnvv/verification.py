"""Structural verification: incompleteness, inconsistency, circularity, redundancy."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, NamedTuple, Sequence

import networkx as nx

from .fpn import FuzzyPetriNet, build_fpn
from .reachability import (ReachabilityGraph, build_reachability_graph,
                           initial_marking)
from .rulebase import BehaviorModel, HornClause, VariableKind, normalize_model


class FindingKind(Enum):
    DANGLING_ANTECEDENT = "incompleteness/dangling-antecedent"
    DEAD_END_CONSEQUENT = "incompleteness/dead-end-consequent"
    EXPLICIT_INCONSISTENCY = "inconsistency/explicit"
    CANDIDATE_INCONSISTENCY = "inconsistency/candidate"
    CIRCULARITY = "circularity"
    DUPLICATE = "redundancy/duplicate"
    SUBSUMED_BY_CONDITION = "redundancy/subsumed-by-condition"
    SUBSUMED_BY_CONCLUSION = "redundancy/subsumed-by-conclusion"

    @property
    def category(self) -> str:
        return self.value.split("/")[0]


_KIND_ORDER = {k: i for i, k in enumerate(FindingKind)}


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class PlaceRef(NamedTuple):
    index: int
    label: str

    def __str__(self) -> str:
        return f"P{self.index}:{self.label}"


@dataclass(frozen=True)
class Finding:
    kind: FindingKind
    severity: Severity
    rules: tuple[str, ...]
    places: tuple[PlaceRef, ...] = ()
    message: str = ""

    def __post_init__(self):
        if not self.rules and not self.places:
            raise ValueError("a finding needs at least one subject")

    @property
    def subjects(self) -> tuple[str, ...]:
        return self.rules + tuple(str(p) for p in self.places)

    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.subjects)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "severity": self.severity.value,
            "rules": list(self.rules),
            "places": [{"index": p.index, "label": p.label} for p in self.places],
            "message": self.message,
        }

    def to_line(self) -> str:
        return f"{self.kind.value} | {self.severity.value} | {', '.join(self.subjects)} | {self.message}"


@dataclass(frozen=True)
class VerificationReport:
    model_ref: str
    findings: tuple[Finding, ...]
    graph_summary: dict[str, Any] = field(default_factory=dict)

    @property
    def has_errors(self) -> bool:
        return any(f.severity is Severity.ERROR for f in self.findings)

    def of_kind(self, *kinds: FindingKind) -> list[Finding]:
        return [f for f in self.findings if f.kind in kinds]

    def to_dict(self) -> dict[str, Any]:
        return {
            "model_ref": self.model_ref,
            "findings": [f.to_dict() for f in self.findings],
            "graph_summary": self.graph_summary,
        }

    def to_text(self) -> str:
        g = self.graph_summary
        lines = [f"verification of {self.model_ref}: {len(self.findings)} finding(s)"]
        lines += [f.to_line() for f in self.findings]
        if g:
            lines.append(f"reachability: {g['nodes']} node(s), {g['edges']} edge(s), "
                         f"loop={'yes' if g['has_loop'] else 'no'}")
            for i, step in enumerate(g["steps"], 1):
                lines.append(f"  step {i}: fired {', '.join(step)}")
            if g["unfired"]:
                lines.append(f"  never fired: {', '.join(g['unfired'])}")
            if g["no_effect"]:
                lines.append(f"  no-effect firings: {', '.join(g['no_effect'])}")
        return "\n".join(lines) + "\n"


def _ref(net: FuzzyPetriNet, index: int) -> PlaceRef:
    return PlaceRef(index, net.label(index))


def _ordered(rule_ids, model_order: dict[str, int]) -> tuple[str, ...]:
    return tuple(sorted(set(rule_ids), key=lambda r: (model_order.get(r, len(model_order)), r)))


def _rule_order(clauses: Sequence[HornClause]) -> dict[str, int]:
    order: dict[str, int] = {}
    for c in clauses:
        order.setdefault(c.source_rule, len(order))
    return order


# -- incompleteness --------------------------------------------------------------

def detect_incompleteness(net: FuzzyPetriNet, clauses: Sequence[HornClause],
                          model: BehaviorModel) -> list[Finding]:
    """Dangling antecedents and dead-end consequents.

    Coverage is judged per property: an antecedent dangles when no clause
    concludes anything about its variable and that variable is not an
    input; a consequent is a dead end when no clause consumes its variable
    and the variable is not an output.
    """
    order = _rule_order(clauses)
    produced = {c.consequent.variable for c in clauses if c.consequent is not None}
    consumed = {a.variable for c in clauses for a in c.antecedents}
    findings = []
    for place in net.places:
        var = place.proposition.variable
        kind = model.kind_of(var)
        users = [c.source_rule for c in clauses if place.proposition in c.antecedents]
        makers = [c.source_rule for c in clauses if c.consequent == place.proposition]
        if users and var not in produced and kind is not VariableKind.INPUT:
            findings.append(Finding(
                FindingKind.DANGLING_ANTECEDENT, Severity.ERROR, _ordered(users, order),
                (_ref(net, place.index),),
                f"{place.label} is used as an antecedent but no rule concludes {var} "
                f"and it is not an input property"))
        if makers and var not in consumed and kind is not VariableKind.OUTPUT:
            findings.append(Finding(
                FindingKind.DEAD_END_CONSEQUENT, Severity.ERROR, _ordered(makers, order),
                (_ref(net, place.index),),
                f"{place.label} is concluded but no rule uses {var} "
                f"and it is not an output property"))
    return sorted(findings, key=Finding.sort_key)


# -- inconsistency ----------------------------------------------------------------

def _chain(net: FuzzyPetriNet, graph: ReachabilityGraph, place: int) -> set[str]:
    """Rules of fired transitions leading (backwards) to ``place``."""
    rules: set[str] = set()
    seen: set[int] = set()
    todo = [place]
    while todo:
        p = todo.pop()
        if p in seen:
            continue
        seen.add(p)
        for t in net.producers(p):
            if t.index in graph.fired:
                rules.add(t.source_rule)
                todo.extend(t.inputs)
    return rules


def detect_inconsistency(net: FuzzyPetriNet, graph: ReachabilityGraph,
                         clauses: Sequence[HornClause]) -> list[Finding]:
    """Contradictory conclusions reachable together.

    A place and its negation both marked is an explicit conflict.  Two terms
    of the same variable concluded from the very same antecedents is flagged
    as a candidate for the expert to resolve.
    """
    order = _rule_order(clauses)
    final = graph.final
    findings = []

    for place in net.places:
        twin = net.twin(place.index)
        if twin is None or place.proposition.negated:
            continue
        if final[place.index] and final[twin]:
            pos, neg = _chain(net, graph, place.index), _chain(net, graph, twin)
            findings.append(Finding(
                FindingKind.EXPLICIT_INCONSISTENCY, Severity.ERROR,
                _ordered(pos | neg, order),
                (_ref(net, place.index), _ref(net, twin)),
                f"{place.label} (via {', '.join(_ordered(pos, order))}) and "
                f"{net.label(twin)} (via {', '.join(_ordered(neg, order))}) are both reachable"))

    by_body: dict[frozenset, list[HornClause]] = {}
    for c in clauses:
        if c.consequent is not None and c.antecedents:
            by_body.setdefault(c.antecedent_set, []).append(c)
    for group in by_body.values():
        for a, b in itertools.combinations(group, 2):
            pa, pb = a.consequent, b.consequent
            if (pa.variable != pb.variable or pa.term == pb.term
                    or pa.negated != pb.negated or a.source_rule == b.source_rule):
                continue
            ia, ib = net.index_of(pa), net.index_of(pb)
            if not (final[ia] and final[ib]):
                continue
            findings.append(Finding(
                FindingKind.CANDIDATE_INCONSISTENCY, Severity.WARNING,
                _ordered((a.source_rule, b.source_rule), order),
                tuple(sorted((_ref(net, ia), _ref(net, ib)))),
                f"{a.source_rule} and {b.source_rule} conclude {pa} and {pb} "
                f"from identical antecedents"))
    return sorted(findings, key=Finding.sort_key)


# -- circularity -------------------------------------------------------------------

def detect_circularity(clauses: Sequence[HornClause]) -> list[Finding]:
    """One finding per strongly connected component of the rule dependency graph."""
    g = nx.DiGraph()
    for i, c in enumerate(clauses):
        g.add_node(("c", i))
        for a in c.antecedents:
            g.add_edge(("p", a), ("c", i))
        if c.consequent is not None:
            g.add_edge(("c", i), ("p", c.consequent))
    findings = []
    for scc in nx.strongly_connected_components(g):
        members = sorted(i for tag, i in scc if tag == "c")
        if len(scc) < 2 or not members:
            continue
        # walk the cycle from the earliest clause
        walk: list[int] = []
        stack = [members[0]]
        while stack:
            i = stack.pop()
            if i in walk:
                continue
            walk.append(i)
            c = clauses[i]
            nxt = [j for j in members if c.consequent in clauses[j].antecedents]
            stack.extend(reversed(nxt))
        rules = tuple(dict.fromkeys(clauses[i].source_rule for i in walk))
        findings.append(Finding(
            FindingKind.CIRCULARITY, Severity.ERROR, rules, (),
            "circular dependency: " + " -> ".join(rules + rules[:1])))
    return sorted(findings, key=Finding.sort_key)


# -- redundancy ------------------------------------------------------------------

def _signature(clauses: Sequence[HornClause]) -> dict[str, set[tuple]]:
    sig: dict[str, set[tuple]] = {}
    for c in clauses:
        sig.setdefault(c.source_rule, set()).add((c.antecedent_set, c.consequent))
    return sig


def _cf_note(cfs: dict[str, float], a: str, b: str) -> str:
    if cfs[a] == cfs[b]:
        return ""
    return f" (cf {cfs[a]:g} vs {cfs[b]:g})"


def detect_redundancy(clauses: Sequence[HornClause]) -> list[Finding]:
    """Duplicate rules and rules subsumed by condition or by conclusion.

    Whole-rule comparisons come first: identical clause sets are duplicates,
    a strict subset of another rule's conclusions under identical antecedents
    is subsumed by conclusion.  Remaining clause-level overlaps between rules
    not already related are reported as duplicates, and a clause whose
    antecedents strictly contain another's, with the same consequent, is
    subsumed by condition.
    """
    order = _rule_order(clauses)
    sig = _signature(clauses)
    cfs = {c.source_rule: c.cf for c in clauses}
    bodies = {r: {body for body, _ in s} for r, s in sig.items()}
    found: dict[tuple[FindingKind, str, str], Finding] = {}
    related: set[frozenset[str]] = set()

    def add(kind: FindingKind, a: str, b: str, message: str) -> None:
        found.setdefault((kind, a, b), Finding(kind, Severity.WARNING, (a, b), (), message))

    rule_ids = list(order)
    for a, b in itertools.combinations(rule_ids, 2):
        if sig[a] == sig[b]:
            add(FindingKind.DUPLICATE, a, b,
                f"{a} and {b} are the same rule{_cf_note(cfs, a, b)}")
            related.add(frozenset((a, b)))
            continue
        for small, big in ((a, b), (b, a)):
            if len(bodies[small]) == 1 and bodies[small] == bodies[big] and sig[small] < sig[big]:
                add(FindingKind.SUBSUMED_BY_CONCLUSION, small, big,
                    f"{small} concludes less than {big} from the same antecedents"
                    f"{_cf_note(cfs, small, big)}")
                related.add(frozenset((a, b)))

    for x, y in itertools.combinations(clauses, 2):
        if x.consequent is None or x.consequent != y.consequent:
            continue
        if x.source_rule == y.source_rule:
            continue
        if x.antecedent_set == y.antecedent_set:
            if frozenset((x.source_rule, y.source_rule)) in related:
                continue
            a, b = x.source_rule, y.source_rule
            add(FindingKind.DUPLICATE, a, b,
                f"{a} and {b} both contain {x}{_cf_note(cfs, a, b)}")
        else:
            for big, small in ((x, y), (y, x)):
                if big.antecedent_set > small.antecedent_set:
                    add(FindingKind.SUBSUMED_BY_CONDITION, big.source_rule, small.source_rule,
                        f"{big.source_rule} has a more restrictive condition than "
                        f"{small.source_rule} for {x.consequent}"
                        f"{_cf_note(cfs, big.source_rule, small.source_rule)}")
    return sorted(found.values(), key=Finding.sort_key)


# -- orchestration ------------------------------------------------------------------

@dataclass(frozen=True)
class Analysis:
    """Everything verify computes on the way to its report."""

    model: BehaviorModel
    clauses: tuple[HornClause, ...]
    net: FuzzyPetriNet
    graph: ReachabilityGraph
    report: VerificationReport


def _summary(net: FuzzyPetriNet, graph: ReachabilityGraph) -> dict[str, Any]:
    def rules(ts) -> list[str]:
        return list(dict.fromkeys(net.transitions[t].source_rule for t in sorted(ts)))

    return {
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "has_loop": graph.has_loop,
        "root_omega": graph.nodes[0].omega_count,
        "final_omega": graph.final.omega_count,
        "places": len(net.places),
        "transitions": len(net.transitions),
        "steps": [rules(step) for step in graph.steps],
        "unfired": rules(set(range(len(net.transitions))) - graph.fired),
        "no_effect": rules(graph.no_effect_firings),
    }


def analyze(model: BehaviorModel) -> Analysis:
    clauses = tuple(normalize_model(model))
    net = build_fpn(clauses, model)
    graph = build_reachability_graph(net, initial_marking(net, model))
    findings = (detect_incompleteness(net, clauses, model)
                + detect_inconsistency(net, graph, clauses)
                + detect_circularity(clauses)
                + detect_redundancy(clauses))
    report = VerificationReport(model.name, tuple(sorted(findings, key=Finding.sort_key)),
                                _summary(net, graph))
    return Analysis(model, clauses, net, graph, report)


def verify(model: BehaviorModel) -> VerificationReport:
    return analyze(model).report
