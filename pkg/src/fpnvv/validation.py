"""Validation of a rule base against an expert-supplied referent.

Static validation compares property sets and rules without reasoning.
Dynamic validation reasons the net on the referent's given inputs and
checks each asserted bound.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

from .fpn import build_fpn
from .inference import InferenceConfig, TruthAssignment, forward_chain
from .rulebase import (BehaviorModel, Proposition, Rule, SchemaError, expect_list,
                       expect_mapping, expect_number, load_document, model_from_dict,
                       normalize_model, parse_proposition)


class ValidationInputError(Exception):
    """Reference values mention propositions the chosen rule base does not know."""


class Relation(str, Enum):
    GT = "gt"
    GE = "ge"
    LT = "lt"
    LE = "le"

    @property
    def compare(self) -> Callable[[float, float], bool]:
        return {"gt": operator.gt, "ge": operator.ge, "lt": operator.lt, "le": operator.le}[self.value]

    @property
    def symbol(self) -> str:
        return {"gt": ">", "ge": ">=", "lt": "<", "le": "<="}[self.value]


@dataclass(frozen=True)
class ReferenceValue:
    id: str
    givens: tuple[tuple[Proposition, float], ...]
    target: Proposition
    relation: Relation
    bound: float

    def __post_init__(self):
        for prop, degree in self.givens:
            if not 0.0 <= degree <= 1.0:
                raise ValueError(f"{self.id}: degree {degree} for {prop} outside [0, 1]")
        if not 0.0 <= self.bound <= 1.0:
            raise ValueError(f"{self.id}: bound {self.bound} outside [0, 1]")

    def __str__(self) -> str:
        lhs = " & ".join(f"{p}={d:g}" for p, d in self.givens)
        return f"{self.id}: {lhs} -> {self.target} {self.relation.symbol} {self.bound:g}"


@dataclass(frozen=True)
class ValidationReferent:
    model: BehaviorModel
    ref_values: tuple[ReferenceValue, ...] = ()


_ASSERT_KEYS = {"var", "term", "negated", "relation", "bound"}
_REF_VALUE_KEYS = {"id", "given", "assert"}


def parse_ref_values(obj: Any, where: str = "ref_values") -> tuple[ReferenceValue, ...]:
    values = []
    for i, item in enumerate(expect_list(obj, where)):
        expect_mapping(item, f"{where}[{i}]", _REF_VALUE_KEYS, ("id", "assert"))
        rid = str(item["id"])
        here = f"ref value {rid!r}"
        givens = []
        for j, g in enumerate(expect_list(item.get("given"), f"{here} given")):
            prop = parse_proposition(g, f"{here} given[{j}]", {"degree"})
            if "degree" not in g:
                raise SchemaError(f"{here} given[{j}]", "missing field 'degree'")
            givens.append((prop, expect_number(g["degree"], f"{here} given[{j}] degree")))
        a = item["assert"]
        expect_mapping(a, f"{here} assert", _ASSERT_KEYS, ("relation", "bound"))
        target = parse_proposition(a, f"{here} assert", {"relation", "bound"})
        try:
            relation = Relation(str(a["relation"]).strip().lower())
        except ValueError:
            raise SchemaError(f"{here} assert",
                              f"relation {a['relation']!r} is not one of gt, ge, lt, le") from None
        bound = expect_number(a["bound"], f"{here} assert bound")
        values.append(ReferenceValue(rid, tuple(givens), target, relation, bound))
    ids = [v.id for v in values]
    for rid in ids:
        if ids.count(rid) > 1:
            raise SchemaError(f"ref value {rid!r}", "duplicate id")
    return tuple(values)


def parse_referent(text: str) -> ValidationReferent:
    """Model document plus a ``ref_values`` list."""
    doc = load_document(text)
    model = model_from_dict(doc, {"ref_values"})
    return ValidationReferent(model, parse_ref_values(doc.get("ref_values")))


def parse_inputs(text: str) -> tuple[tuple[Proposition, float], ...]:
    """Inputs document for reasoning: a list of ``{var, term, degree}``."""
    doc = load_document(text)
    if isinstance(doc, dict):
        expect_mapping(doc, "document", {"inputs"}, ("inputs",))
        doc = doc["inputs"]
    out = []
    for i, g in enumerate(expect_list(doc, "inputs")):
        prop = parse_proposition(g, f"inputs[{i}]", {"degree"})
        if "degree" not in g:
            raise SchemaError(f"inputs[{i}]", "missing field 'degree'")
        out.append((prop, expect_number(g["degree"], f"inputs[{i}] degree")))
    return tuple(out)


# -- static ---------------------------------------------------------------------

@dataclass(frozen=True)
class StaticReport:
    missing_input_props: frozenset[str]
    missing_internal_props: frozenset[str]
    missing_output_props: frozenset[str]
    missing_rules: tuple[str, ...]
    extra_rules: tuple[str, ...]
    cf_mismatches: tuple[tuple[str, str], ...]
    # informational only: declared by the model, absent from the referent
    extra_input_props: frozenset[str] = frozenset()
    extra_internal_props: frozenset[str] = frozenset()
    extra_output_props: frozenset[str] = frozenset()

    @property
    def clean(self) -> bool:
        return not (self.missing_input_props or self.missing_internal_props
                    or self.missing_output_props or self.missing_rules
                    or self.extra_rules or self.cf_mismatches)

    def to_dict(self) -> dict[str, Any]:
        return {
            "missing_input_props": sorted(self.missing_input_props),
            "missing_internal_props": sorted(self.missing_internal_props),
            "missing_output_props": sorted(self.missing_output_props),
            "missing_rules": list(self.missing_rules),
            "extra_rules": list(self.extra_rules),
            "cf_mismatches": [list(p) for p in self.cf_mismatches],
            "extra_input_props": sorted(self.extra_input_props),
            "extra_internal_props": sorted(self.extra_internal_props),
            "extra_output_props": sorted(self.extra_output_props),
        }

    def to_text(self) -> str:
        def fmt(items) -> str:
            return ", ".join(items) if items else "-"

        rows = [
            ("missing input properties", fmt(sorted(self.missing_input_props))),
            ("missing internal properties", fmt(sorted(self.missing_internal_props))),
            ("missing output properties", fmt(sorted(self.missing_output_props))),
            ("referent rules not in model", fmt(self.missing_rules)),
            ("model rules not in referent", fmt(self.extra_rules)),
            ("cf mismatches", fmt([f"{m}~{r}" for m, r in self.cf_mismatches])),
            ("extra input properties (info)", fmt(sorted(self.extra_input_props))),
            ("extra internal properties (info)", fmt(sorted(self.extra_internal_props))),
            ("extra output properties (info)", fmt(sorted(self.extra_output_props))),
        ]
        width = max(len(name) for name, _ in rows)
        return "".join(f"{name.ljust(width)} : {value}\n" for name, value in rows)


def _same_structure(a: Rule, b: Rule) -> bool:
    return (a.antecedent_set == b.antecedent_set and a.consequent_set == b.consequent_set
            and a.connective == b.connective and a.kind == b.kind)


def static_validate(model: BehaviorModel, referent: BehaviorModel | ValidationReferent) -> StaticReport:
    """Compare property sets and rules of ``model`` with the referent's.

    Rules are matched one-to-one on identical antecedent and consequent
    sets; a structural match with a different cf is a cf mismatch.
    """
    ref = referent.model if isinstance(referent, ValidationReferent) else referent
    unmatched = list(model.rules)
    missing, mismatched = [], []
    for r in ref.rules:
        match = next((m for m in unmatched if _same_structure(m, r)), None)
        if match is None:
            missing.append(r.id)
            continue
        unmatched.remove(match)
        if not math.isclose(match.cf, r.cf, rel_tol=0.0, abs_tol=1e-12):
            mismatched.append((match.id, r.id))
    return StaticReport(
        missing_input_props=ref.input_props - model.input_props,
        missing_internal_props=ref.internal_props - model.internal_props,
        missing_output_props=ref.output_props - model.output_props,
        missing_rules=tuple(missing),
        extra_rules=tuple(m.id for m in unmatched),
        cf_mismatches=tuple(mismatched),
        extra_input_props=model.input_props - ref.input_props,
        extra_internal_props=model.internal_props - ref.internal_props,
        extra_output_props=model.output_props - ref.output_props,
    )


# -- dynamic ------------------------------------------------------------------------

class Base(str, Enum):
    MODEL = "model"
    REFERENT = "referent"


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass(frozen=True)
class RefValueResult:
    ref_id: str
    target: Proposition
    relation: Relation
    bound: float
    computed: float | None
    verdict: Verdict
    trace: tuple[str, ...] = ()
    near_miss: bool = False
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.ref_id,
            "target": str(self.target),
            "relation": self.relation.value,
            "bound": self.bound,
            "computed": self.computed,
            "verdict": self.verdict.value,
            "trace": list(self.trace),
            "near_miss": self.near_miss,
            "reason": self.reason,
        }

    def to_line(self) -> str:
        value = "underivable" if self.computed is None else f"{self.computed:.10g}"
        note = " (near miss)" if self.near_miss else ""
        via = f" via {', '.join(self.trace)}" if self.trace else ""
        return (f"{self.ref_id}: {self.target} = {value} {self.relation.symbol} "
                f"{self.bound:g}? {self.verdict.value}{note}{via}")


@dataclass(frozen=True)
class DynamicReport:
    base: Base
    results: tuple[RefValueResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(r.verdict is Verdict.PASS for r in self.results)

    def __getitem__(self, ref_id: str) -> RefValueResult:
        for r in self.results:
            if r.ref_id == ref_id:
                return r
        raise KeyError(ref_id)

    def to_dict(self) -> dict[str, Any]:
        return {"base": self.base.value, "results": [r.to_dict() for r in self.results]}

    def to_text(self) -> str:
        head = f"dynamic validation on the {self.base.value} rule base\n"
        return head + "".join(r.to_line() + "\n" for r in self.results)


def dynamic_validate(rulebase_choice: Base | str, model: BehaviorModel | None,
                     referent: ValidationReferent,
                     cfg: InferenceConfig = InferenceConfig()) -> DynamicReport:
    """Reason the chosen rule base on each reference value's inputs.

    The chosen base is expected to be free of structural errors.  A target
    the base has no place for fails as underivable; givens it has no place
    for raise ValidationInputError.
    """
    choice = Base(rulebase_choice)
    base = referent.model if choice is Base.REFERENT else model
    if base is None:
        raise ValueError("a model is required when validating the model rule base")
    clauses = normalize_model(base)
    net = build_fpn(clauses, base)
    results = []
    for rv in referent.ref_values:
        try:
            inputs = TruthAssignment.from_propositions(net, rv.givens)
        except KeyError as exc:
            raise ValidationInputError(
                f"{rv.id}: {exc.args[0]} is not a proposition of the {choice.value} rule base"
            ) from None
        if not net.has_place(rv.target):
            results.append(RefValueResult(rv.id, rv.target, rv.relation, rv.bound, None,
                                          Verdict.FAIL, reason="underivable"))
            continue
        alpha = forward_chain(net, clauses, inputs, cfg)
        place = net.index_of(rv.target)
        value = alpha[place]
        verdict = Verdict.PASS if rv.relation.compare(value, rv.bound) else Verdict.FAIL
        trace = tuple(dict.fromkeys(c.source_rule for c in alpha.derivation(place)))
        results.append(RefValueResult(
            rv.id, rv.target, rv.relation, rv.bound, value, verdict, trace,
            near_miss=abs(value - rv.bound) <= cfg.epsilon))
    return DynamicReport(choice, tuple(results))
