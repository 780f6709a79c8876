"""Forward-chaining fuzzy reasoning with certainty factors.

A clause fires when every antecedent degree reaches the threshold and
yields ``min(antecedent degrees) * cf``.  Competing derivations of one
place combine by MAX; evaluation runs to the least fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .fpn import FuzzyPetriNet
from .rulebase import HornClause, Proposition


class InferenceError(Exception):
    pass


@dataclass(frozen=True)
class InferenceConfig:
    threshold: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon {self.epsilon} must be non-negative")


@dataclass(frozen=True)
class TruthAssignment:
    """Truth degree per place index (absent means 0).

    ``support`` records, for derived places, the clause of the best
    derivation found.
    """

    degrees: Mapping[int, float] = field(default_factory=dict)
    support: Mapping[int, HornClause] = field(default_factory=dict)

    def __post_init__(self):
        for place, value in self.degrees.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"degree {value} at place {place} outside [0, 1]")

    def __getitem__(self, place: int) -> float:
        return self.degrees.get(place, 0.0)

    @classmethod
    def from_propositions(cls, net: FuzzyPetriNet,
                          values: Mapping[Proposition, float] | Iterable[tuple[Proposition, float]]
                          ) -> TruthAssignment:
        """Build from proposition/degree pairs; unknown propositions raise KeyError."""
        items = values.items() if isinstance(values, Mapping) else values
        degrees: dict[int, float] = {}
        for prop, value in items:
            if not net.has_place(prop):
                raise KeyError(prop)
            degrees[net.index_of(prop)] = float(value)
        return cls(degrees)

    def by_proposition(self, net: FuzzyPetriNet) -> dict[Proposition, float]:
        return {p.proposition: self[p.index] for p in net.places}

    def derivation(self, place: int) -> list[HornClause]:
        """Clauses on the best derivation of ``place``, leaves first."""
        place_of = {c.consequent: p for p, c in self.support.items()}
        out: list[HornClause] = []
        seen: set[int] = set()

        def walk(p: int) -> None:
            clause = self.support.get(p)
            if clause is None or p in seen:
                return
            seen.add(p)
            for ant in clause.antecedents:
                walk(place_of.get(ant, -1))
            out.append(clause)

        walk(place)
        return out


def apply_clause(clause: HornClause, alpha: TruthAssignment, net: FuzzyPetriNet,
                 cfg: InferenceConfig = InferenceConfig()) -> float | None:
    """Degree the clause would give its consequent, or None if not enabled."""
    if not clause.antecedents:
        return clause.cf
    degrees = [alpha[net.index_of(a)] for a in clause.antecedents]
    if any(d < cfg.threshold for d in degrees):
        return None
    return min(degrees) * clause.cf


def forward_chain(net: FuzzyPetriNet, clauses: Sequence[HornClause], inputs: TruthAssignment,
                  cfg: InferenceConfig = InferenceConfig()) -> TruthAssignment:
    """Least fixpoint of the clause set over ``inputs``.

    Clauses are applied in the order given; the result does not depend on
    that order.  Every place of the net gets a degree in the result.
    """
    degrees = {p.index: 0.0 for p in net.places}
    degrees.update(inputs.degrees)
    support: dict[int, HornClause] = {}
    state = TruthAssignment(degrees, support)
    # simple derivation paths use each clause at most once, so this many rounds suffice
    for _ in range(len(clauses) + 1):
        changed = False
        for clause in clauses:
            if clause.consequent is None:
                continue
            value = apply_clause(clause, state, net, cfg)
            target = net.index_of(clause.consequent)
            if value is not None and value > degrees[target]:
                degrees[target] = value
                support[target] = clause
                changed = True
        if not changed:
            return TruthAssignment(dict(degrees), dict(support))
    raise InferenceError(f"no fixpoint after {len(clauses) + 1} rounds")
