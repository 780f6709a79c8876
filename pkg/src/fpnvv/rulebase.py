"""Rule-base data model, document parsing and Horn-clause normalization.

A behavior model partitions its linguistic variables into input, internal
and output properties and holds an ordered list of rules carrying
certainty factors.  Documents are YAML (JSON is accepted too, being a
subset of it).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Sequence

import yaml

DEFAULT_TERMS = ("vl", "l", "m", "h", "vh")


class RuleBaseError(Exception):
    """Base class for everything that can go wrong reading a rule base."""


class ParseError(RuleBaseError):
    """Document is not well-formed YAML."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"syntax error{where}: {message}")


class SchemaError(RuleBaseError):
    """Document parsed but violates the model schema or a model invariant.

    ``element`` names the offending piece (a rule id, a variable, a key path).
    """

    def __init__(self, element: str, message: str):
        self.element = element
        super().__init__(f"{element}: {message}")


def canonical_term(label: str) -> str:
    term = str(label).strip().casefold()
    if not term:
        raise ValueError("linguistic term must be non-empty")
    return term


class Connective(str, Enum):
    AND = "and"
    OR = "or"


class RuleKind(str, Enum):
    NORMAL = "normal"
    FACT = "fact"
    QUERY = "query"


class VariableKind(str, Enum):
    INPUT = "input"
    INTERNAL = "internal"
    OUTPUT = "output"


@dataclass(frozen=True, order=True)
class Proposition:
    """``variable(term)``, optionally negated (``~variable(term)``)."""

    variable: str
    term: str
    negated: bool = False

    def __post_init__(self):
        if not self.variable:
            raise ValueError("proposition variable must be non-empty")
        object.__setattr__(self, "term", canonical_term(self.term))

    @property
    def key(self) -> tuple[str, str]:
        return (self.variable, self.term)

    def negate(self) -> Proposition:
        return replace(self, negated=not self.negated)

    def __str__(self) -> str:
        return f"{'~' if self.negated else ''}{self.variable}({self.term})"


def _unique(props: Iterable[Proposition]) -> tuple[Proposition, ...]:
    return tuple(dict.fromkeys(props))


@dataclass(frozen=True)
class Rule:
    """A rule as written: AND/OR-joined antecedents implying consequents.

    Antecedents and consequents are kept as ordered, duplicate-free tuples;
    comparisons between rules should go through :attr:`antecedent_set` and
    :attr:`consequent_set`.
    """

    id: str
    antecedents: tuple[Proposition, ...]
    consequents: tuple[Proposition, ...]
    cf: float = 1.0
    connective: Connective = Connective.AND
    kind: RuleKind = RuleKind.NORMAL

    def __post_init__(self):
        object.__setattr__(self, "antecedents", _unique(self.antecedents))
        object.__setattr__(self, "consequents", _unique(self.consequents))
        object.__setattr__(self, "connective", Connective(self.connective))
        object.__setattr__(self, "kind", RuleKind(self.kind))
        if not self.id:
            raise ValueError("rule id must be non-empty")
        if not 0.0 <= float(self.cf) <= 1.0:
            raise ValueError(f"rule {self.id}: cf {self.cf} outside [0, 1]")
        object.__setattr__(self, "cf", float(self.cf))
        if self.kind is RuleKind.FACT:
            if self.antecedents:
                raise ValueError(f"rule {self.id}: a fact has no antecedents")
            if not self.consequents:
                raise ValueError(f"rule {self.id}: a fact needs a consequent")
        elif self.kind is RuleKind.QUERY:
            if self.consequents:
                raise ValueError(f"rule {self.id}: a query has no consequents")
            if not self.antecedents:
                raise ValueError(f"rule {self.id}: a query needs an antecedent")
        elif not self.antecedents or not self.consequents:
            raise ValueError(f"rule {self.id}: antecedents and consequents must be non-empty")
        if self.antecedent_set & self.consequent_set:
            raise ValueError(f"rule {self.id}: antecedents and consequents overlap")
        if self.connective is Connective.OR and len(self.consequents) > 1:
            raise ValueError(f"rule {self.id}: 'or' rules take a single consequent")

    @property
    def antecedent_set(self) -> frozenset[Proposition]:
        return frozenset(self.antecedents)

    @property
    def consequent_set(self) -> frozenset[Proposition]:
        return frozenset(self.consequents)

    @property
    def rule_type(self) -> int:
        """1 for a plain conjunction, 2 for several consequents, 3 for a disjunction."""
        if self.connective is Connective.OR and len(self.antecedents) > 1:
            return 3
        if len(self.consequents) > 1:
            return 2
        return 1


@dataclass(frozen=True)
class HornClause:
    """AND-joined antecedents and at most one consequent.

    ``consequent`` is None only for clauses coming from query rules; fact
    clauses have empty antecedents.
    """

    source_rule: str
    antecedents: tuple[Proposition, ...]
    consequent: Proposition | None
    cf: float

    @property
    def antecedent_set(self) -> frozenset[Proposition]:
        return frozenset(self.antecedents)

    @property
    def propositions(self) -> tuple[Proposition, ...]:
        tail = (self.consequent,) if self.consequent is not None else ()
        return self.antecedents + tail

    def __str__(self) -> str:
        lhs = " & ".join(map(str, self.antecedents))
        rhs = str(self.consequent) if self.consequent is not None else "."
        return f"{self.source_rule}: {lhs} -> {rhs} ({self.cf:g})"


@dataclass(frozen=True)
class Variable:
    id: str
    kind: VariableKind
    terms: tuple[str, ...] = DEFAULT_TERMS

    def __post_init__(self):
        object.__setattr__(self, "kind", VariableKind(self.kind))
        object.__setattr__(self, "terms", tuple(dict.fromkeys(canonical_term(t) for t in self.terms)))


@dataclass(frozen=True)
class BehaviorModel:
    """Named rule base over declared input, internal and output properties."""

    name: str
    variables: tuple[Variable, ...] = ()
    rules: tuple[Rule, ...] = ()
    _kinds: dict[str, Variable] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rules", tuple(self.rules))
        kinds: dict[str, Variable] = {}
        for var in self.variables:
            if var.id in kinds:
                raise SchemaError(f"variable {var.id!r}", "declared more than once")
            kinds[var.id] = var
        object.__setattr__(self, "_kinds", kinds)

        seen: set[str] = set()
        for rule in self.rules:
            if rule.id in seen:
                raise SchemaError(f"rule {rule.id!r}", "duplicate rule id")
            seen.add(rule.id)
            for side, props in (("if", rule.antecedents), ("then", rule.consequents)):
                for prop in props:
                    self._check_proposition(rule.id, side, prop)

    def _check_proposition(self, rule_id: str, side: str, prop: Proposition) -> None:
        var = self._kinds.get(prop.variable)
        if var is None:
            raise SchemaError(
                f"rule {rule_id!r}", f"undeclared variable {prop.variable!r}")
        if prop.term not in var.terms:
            raise SchemaError(
                f"rule {rule_id!r}",
                f"term {prop.term!r} not in vocabulary of {var.id!r} {list(var.terms)}")
        if side == "then" and var.kind is VariableKind.INPUT:
            raise SchemaError(
                f"rule {rule_id!r}", f"input variable {var.id!r} used as a consequent")
        if side == "if" and var.kind is VariableKind.OUTPUT:
            raise SchemaError(
                f"rule {rule_id!r}", f"output variable {var.id!r} used as an antecedent")

    def _ids(self, kind: VariableKind) -> frozenset[str]:
        return frozenset(v.id for v in self.variables if v.kind is kind)

    @property
    def input_props(self) -> frozenset[str]:
        return self._ids(VariableKind.INPUT)

    @property
    def internal_props(self) -> frozenset[str]:
        return self._ids(VariableKind.INTERNAL)

    @property
    def output_props(self) -> frozenset[str]:
        return self._ids(VariableKind.OUTPUT)

    def variable(self, var_id: str) -> Variable:
        return self._kinds[var_id]

    def kind_of(self, var_id: str) -> VariableKind:
        return self._kinds[var_id].kind

    def declares(self, prop: Proposition) -> bool:
        var = self._kinds.get(prop.variable)
        return var is not None and prop.term in var.terms

    def rule(self, rule_id: str) -> Rule:
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        raise KeyError(rule_id)

    def without_rules(self, rule_ids: Iterable[str]) -> BehaviorModel:
        """Copy of the model with the given rules removed (unknown ids are an error)."""
        drop = set(rule_ids)
        unknown = drop - {r.id for r in self.rules}
        if unknown:
            raise SchemaError(f"rule {sorted(unknown)[0]!r}", "cannot drop: no such rule")
        return BehaviorModel(self.name, self.variables,
                             tuple(r for r in self.rules if r.id not in drop))


# -- normalization -------------------------------------------------------------

def normalize(rule: Rule) -> list[HornClause]:
    """Split a rule into Horn clauses that all carry the rule's cf.

    Several consequents give one clause per consequent; a disjunction gives
    one clause per disjunct.  Query rules yield clauses without consequent.
    """
    heads: Sequence[Proposition | None] = rule.consequents or (None,)
    if rule.connective is Connective.OR and len(rule.antecedents) > 1:
        bodies = [(a,) for a in rule.antecedents]
    else:
        bodies = [rule.antecedents]
    return [HornClause(rule.id, body, head, rule.cf) for body in bodies for head in heads]


def normalize_model(model: BehaviorModel) -> list[HornClause]:
    return [clause for rule in model.rules for clause in normalize(rule)]


# -- documents -----------------------------------------------------------------

_MODEL_KEYS = {"name", "variables", "rules"}
_VARIABLE_KEYS = {"id", "kind", "terms"}
_RULE_KEYS = {"id", "kind", "if", "connective", "then", "cf"}
_PROP_KEYS = {"var", "term", "negated"}


# libyaml when PyYAML was built with it; same safe schema, much faster
_Loader = getattr(yaml, "CSafeLoader", yaml.SafeLoader)


def load_document(text: str) -> Any:
    try:
        return yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        column = mark.column + 1 if mark else None
        raise ParseError(exc.problem or str(exc), line, column) from None
    except yaml.YAMLError as exc:
        raise ParseError(str(exc)) from None


def expect_mapping(obj: Any, where: str, allowed: set[str], required: Iterable[str] = ()) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError(where, f"expected a mapping, got {type(obj).__name__}")
    unknown = set(map(str, obj)) - allowed
    if unknown:
        raise SchemaError(where, f"unknown field {sorted(unknown)[0]!r}")
    for key in required:
        if key not in obj:
            raise SchemaError(where, f"missing field {key!r}")
    return obj


def expect_list(obj: Any, where: str) -> list:
    if obj is None:
        return []
    if not isinstance(obj, list):
        raise SchemaError(where, f"expected a list, got {type(obj).__name__}")
    return obj


def expect_number(obj: Any, where: str, lo: float = 0.0, hi: float = 1.0) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float, str)):
        raise SchemaError(where, f"expected a number, got {obj!r}")
    try:
        value = float(obj)
    except ValueError:
        raise SchemaError(where, f"expected a number, got {obj!r}") from None
    if not lo <= value <= hi:
        raise SchemaError(where, f"value {value:g} outside [{lo:g}, {hi:g}]")
    return value


def parse_proposition(obj: Any, where: str, extra_keys: set[str] = frozenset()) -> Proposition:
    expect_mapping(obj, where, _PROP_KEYS | extra_keys, ("var", "term"))
    negated = obj.get("negated", False)
    if not isinstance(negated, bool):
        raise SchemaError(where, f"'negated' must be true or false, got {negated!r}")
    try:
        return Proposition(str(obj["var"]), str(obj["term"]), negated)
    except ValueError as exc:
        raise SchemaError(where, str(exc)) from None


def _enum(enum_cls, value: Any, where: str):
    try:
        return enum_cls(str(value).strip().lower())
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise SchemaError(where, f"{value!r} is not one of: {choices}") from None


def _parse_rule(obj: Any, index: int) -> Rule:
    where = f"rules[{index}]"
    expect_mapping(obj, where, _RULE_KEYS, ("id", "cf"))
    rule_id = str(obj["id"])
    where = f"rule {rule_id!r}"
    kind = _enum(RuleKind, obj.get("kind", "normal"), where)
    connective = _enum(Connective, obj.get("connective", "and"), where)
    ants = [parse_proposition(p, f"{where} if[{i}]")
            for i, p in enumerate(expect_list(obj.get("if"), f"{where} if"))]
    cons = [parse_proposition(p, f"{where} then[{i}]")
            for i, p in enumerate(expect_list(obj.get("then"), f"{where} then"))]
    cf = expect_number(obj["cf"], f"{where} cf")
    try:
        return Rule(rule_id, tuple(ants), tuple(cons), cf, connective, kind)
    except ValueError as exc:
        raise SchemaError(where, str(exc)) from None


def model_from_dict(doc: Any, extra_keys: set[str] = frozenset()) -> BehaviorModel:
    doc = expect_mapping(doc, "document", _MODEL_KEYS | extra_keys, ("name",))
    variables = []
    for i, obj in enumerate(expect_list(doc.get("variables"), "variables")):
        expect_mapping(obj, f"variables[{i}]", _VARIABLE_KEYS, ("id", "kind"))
        where = f"variable {obj['id']!r}"
        kind = _enum(VariableKind, obj["kind"], where)
        terms = expect_list(obj.get("terms", list(DEFAULT_TERMS)), f"{where} terms")
        try:
            variables.append(Variable(str(obj["id"]), kind, tuple(map(str, terms))))
        except ValueError as exc:
            raise SchemaError(where, str(exc)) from None
    rules = [_parse_rule(obj, i) for i, obj in enumerate(expect_list(doc.get("rules"), "rules"))]
    return BehaviorModel(str(doc["name"]), tuple(variables), tuple(rules))


def parse_model(text: str) -> BehaviorModel:
    """Parse a model document; raises ParseError or SchemaError."""
    return model_from_dict(load_document(text))


def dump_model(model: BehaviorModel) -> str:
    """Serialize back to the document format (round-trips through parse_model)."""

    def prop(p: Proposition) -> dict:
        out: dict[str, Any] = {"var": p.variable, "term": p.term}
        if p.negated:
            out["negated"] = True
        return out

    doc = {
        "name": model.name,
        "variables": [{"id": v.id, "kind": v.kind.value, "terms": list(v.terms)}
                      for v in model.variables],
        "rules": [{"id": r.id, "kind": r.kind.value, "if": [prop(p) for p in r.antecedents],
                   "connective": r.connective.value, "then": [prop(p) for p in r.consequents],
                   "cf": r.cf} for r in model.rules],
    }
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True)
