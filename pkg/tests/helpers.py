"""Random rule-base generators and independent oracles shared by the tests."""

from __future__ import annotations

import random
from pathlib import Path

from fpnvv.rulebase import (BehaviorModel, Connective, HornClause, Proposition, Rule,
                            RuleKind, Variable, VariableKind, parse_model)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load(name: str) -> BehaviorModel:
    if name.startswith("referent"):
        from fpnvv.validation import parse_referent
        return parse_referent(fixture_text(name)).model
    return parse_model(fixture_text(name))


def random_model(rng: random.Random, max_props: int = 6, max_rules: int = 6,
                 allow_or: bool = True, allow_facts: bool = True) -> BehaviorModel:
    """Acyclic, negation-free model with at most ``max_props`` propositions.

    Variables are ranked; a rule only concludes variables ranked above all
    of its antecedents, which keeps the dependency graph acyclic.
    """
    n_in = rng.randint(1, 2)
    n_int = rng.randint(0, 2)
    n_out = rng.randint(1, 2)
    variables, props = [], []
    rank = {}
    budget = max_props
    for kind, count in ((VariableKind.INPUT, n_in), (VariableKind.INTERNAL, n_int),
                        (VariableKind.OUTPUT, n_out)):
        for _ in range(count):
            if budget <= 0:
                break
            name = f"{kind.value[:3]}{len(variables)}"
            terms = rng.sample(["l", "m", "h"], k=min(budget, rng.randint(1, 2)))
            budget -= len(terms)
            variables.append(Variable(name, kind, tuple(terms)))
            rank[name] = len(rank)
            props.extend(Proposition(name, t) for t in terms)
    kinds = {v.id: v.kind for v in variables}
    rules = []
    for i in range(rng.randint(0, max_rules)):
        heads = [p for p in props if kinds[p.variable] is not VariableKind.INPUT]
        if not heads:
            break
        head_rank = rank[rng.choice(heads).variable]
        same_or_above = [p for p in heads if rank[p.variable] >= head_rank]
        cf = round(rng.uniform(0.05, 1.0), 2)
        body_pool = [p for p in props if rank[p.variable] < head_rank
                     and kinds[p.variable] is not VariableKind.OUTPUT]
        if not body_pool or (allow_facts and rng.random() < 0.1):
            if not allow_facts:
                continue
            cons = rng.sample(same_or_above, k=1)
            rules.append(Rule(f"F{i}", (), tuple(cons), cf, kind=RuleKind.FACT))
            continue
        body = rng.sample(body_pool, k=rng.randint(1, min(3, len(body_pool))))
        connective = Connective.AND
        if allow_or and len(body) > 1 and rng.random() < 0.3:
            connective = Connective.OR
            cons = [rng.choice([p for p in same_or_above if rank[p.variable] == head_rank])]
        else:
            top = [p for p in same_or_above]
            cons = rng.sample(top, k=rng.randint(1, min(2, len(top))))
        rules.append(Rule(f"R{i}", tuple(body), tuple(cons), cf, connective))
    return BehaviorModel("random", tuple(variables), tuple(rules))


def random_inputs(rng: random.Random, model: BehaviorModel, positive: bool = False):
    out = {}
    for var in model.variables:
        if var.kind is VariableKind.INPUT:
            for t in var.terms:
                lo = 0.05 if positive else 0.0
                out[Proposition(var.id, t)] = round(rng.uniform(lo, 1.0), 3)
    return out


def direct_evaluate(model: BehaviorModel, inputs: dict[Proposition, float]) -> dict[Proposition, float]:
    """Rule-level evaluation without normalization or a net.

    AND rules give min(antecedents) * cf to every consequent, OR rules give
    max(antecedents) * cf; competing rules combine by max.  Recursive over
    the (acyclic) rule graph.
    """
    memo: dict[Proposition, float] = {}

    def degree(p: Proposition) -> float:
        if p in memo:
            return memo[p]
        best = inputs.get(p, 0.0)
        for r in model.rules:
            if p not in r.consequents:
                continue
            if not r.antecedents:
                value = r.cf
            elif r.connective is Connective.OR:
                value = max(degree(a) for a in r.antecedents) * r.cf
            else:
                value = min(degree(a) for a in r.antecedents) * r.cf
            best = max(best, value)
        memo[p] = best
        return best

    props = {p for r in model.rules for p in r.antecedents + r.consequents} | set(inputs)
    return {p: degree(p) for p in props}


def naive_fixpoint(clauses: list[HornClause], inputs: dict[Proposition, float],
                   rng: random.Random) -> dict[Proposition, float]:
    """Apply one randomly chosen clause at a time until nothing changes."""
    deg = dict(inputs)
    while True:
        changed = False
        for c in rng.sample(clauses, k=len(clauses)):
            if c.consequent is None:
                continue
            v = min((deg.get(a, 0.0) for a in c.antecedents), default=1.0) * c.cf
            if v > deg.get(c.consequent, 0.0):
                deg[c.consequent] = v
                changed = True
        if not changed:
            return deg


def infer(model: BehaviorModel, inputs: dict[Proposition, float], cfg=None,
          clauses: list[HornClause] | None = None) -> dict[Proposition, float]:
    """Normalize, build the net and forward-chain; degrees keyed by proposition."""
    from fpnvv.fpn import build_fpn
    from fpnvv.inference import InferenceConfig, TruthAssignment, forward_chain
    from fpnvv.rulebase import normalize_model
    clauses = normalize_model(model) if clauses is None else clauses
    net = build_fpn(clauses, model)
    known = {p: d for p, d in inputs.items() if net.has_place(p)}
    alpha = forward_chain(net, clauses, TruthAssignment.from_propositions(net, known),
                          cfg or InferenceConfig())
    return alpha.by_proposition(net)
