import pytest

from fpnvv.rulebase import (BehaviorModel, Connective, HornClause, ParseError, Proposition,
                            Rule, RuleKind, SchemaError, Variable, VariableKind, dump_model,
                            normalize, normalize_model, parse_model)

from helpers import fixture_text, load


def P(var, term="t", negated=False):
    return Proposition(var, term, negated)


def test_case_study_shape():
    m = load("casestudy.yaml")
    assert len(m.rules) == 10
    assert len(m.input_props) == 11
    assert m.internal_props == {"Tea", "Reg", "Beh", "Att"}
    assert m.output_props == {"Pop"}
    r1 = m.rule("R1")
    assert r1.antecedents == (P("Q1", "vh"), P("Q2", "h"), P("Q3", "vh"))
    assert r1.consequents == (P("Tea", "vh"),)
    assert r1.cf == 0.95


def test_empty_rule_set():
    m = parse_model("name: empty\nvariables:\n- {id: A, kind: input}\n")
    assert m.rules == ()
    assert m.input_props == {"A"}


def test_undeclared_variable_is_named():
    doc = """
name: bad
variables: [{id: A, kind: input}, {id: B, kind: output}]
rules:
- {id: r1, if: [{var: X, term: h}], then: [{var: B, term: h}], cf: 0.5}
"""
    with pytest.raises(SchemaError, match="'X'"):
        parse_model(doc)


@pytest.mark.parametrize("rules, fragment", [
    ("- {id: r1, if: [{var: A, term: h}], then: [{var: B, term: h}], cf: 1.5}", "cf"),
    ("- {id: r1, if: [{var: A, term: h}], then: [{var: B, term: h}], cf: 0.5}\n"
     "- {id: r1, if: [{var: A, term: l}], then: [{var: B, term: l}], cf: 0.5}", "duplicate"),
    ("- {id: r1, if: [{var: A, term: h}], then: [{var: B, term: h}], cf: 0.5, weight: 2}", "weight"),
    ("- {id: r1, if: [{var: A, term: huge}], then: [{var: B, term: h}], cf: 0.5}", "huge"),
    ("- {id: r1, if: [{var: B, term: h}], then: [{var: A, term: h}], cf: 0.5}", "variable .* used as"),
    ("- {id: r1, connective: or, if: [{var: A, term: h}], "
     "then: [{var: B, term: h}, {var: B, term: l}], cf: 0.5}", "single consequent"),
    ("- {id: r1, if: [{var: A, term: h}], then: [], cf: 0.5}", "non-empty"),
])
def test_schema_violations(rules, fragment):
    doc = f"name: m\nvariables: [{{id: A, kind: input}}, {{id: B, kind: output}}]\nrules:\n{rules}\n"
    with pytest.raises(SchemaError, match=fragment) as info:
        parse_model(doc)
    assert "r1" in str(info.value) or "rules[" in str(info.value)


def test_syntax_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_model("name: x\nrules: [\n  {id: r1,\n")
    assert info.value.line is not None and info.value.column is not None
    assert "line" in str(info.value)


def test_terms_are_case_folded():
    doc = """
name: m
variables: [{id: A, kind: input, terms: [VH, Low]}, {id: B, kind: output}]
rules:
- {id: r1, if: [{var: A, term: ' vh '}], then: [{var: B, term: H}], cf: 0.5}
"""
    m = parse_model(doc)
    assert m.rule("r1").antecedents == (P("A", "VH"),)
    assert P("A", "Vh") == P("A", "vh")


def test_round_trip_through_dump():
    m = load("casestudy.yaml")
    assert parse_model(dump_model(m)) == m
    toy = load("incompleteness.yaml")
    assert parse_model(dump_model(toy)) == toy


def test_fact_and_query_rules():
    m = load("incompleteness.yaml")
    assert m.rule("r1").kind is RuleKind.FACT and m.rule("r1").antecedents == ()
    assert m.rule("r4").kind is RuleKind.QUERY and m.rule("r4").consequents == ()


# -- normalization

def test_type2_splits_per_consequent():
    r5 = Rule("r5", (P("P4"),), (P("P5"), P("P6")), 0.7)
    assert normalize(r5) == [
        HornClause("r5", (P("P4"),), P("P5"), 0.7),
        HornClause("r5", (P("P4"),), P("P6"), 0.7),
    ]


def test_type1_is_unchanged():
    m = load("casestudy.yaml")
    r1 = m.rule("R1")
    (clause,) = normalize(r1)
    assert clause.antecedents == r1.antecedents
    assert clause.consequent == P("Tea", "vh")
    assert clause.cf == 0.95 and clause.source_rule == "R1"


def test_type3_splits_per_disjunct():
    r = Rule("r", (P("P1"), P("P2")), (P("P3"),), 0.4, Connective.OR)
    assert r.rule_type == 3
    assert normalize(r) == [
        HornClause("r", (P("P1"),), P("P3"), 0.4),
        HornClause("r", (P("P2"),), P("P3"), 0.4),
    ]


def test_normalize_is_idempotent_on_clauses():
    r = Rule("r", (P("A"), P("B")), (P("C"), P("D")), 0.3)
    for clause in normalize(r):
        as_rule = Rule(clause.source_rule, clause.antecedents, (clause.consequent,), clause.cf)
        assert normalize(as_rule) == [clause]


def test_normalize_model():
    clauses = normalize_model(load("casestudy.yaml"))
    assert [c.source_rule for c in clauses] == [f"R{i}" for i in range(1, 11)]
    assert normalize_model(BehaviorModel("empty")) == []
    m = BehaviorModel(
        "t2",
        (Variable("A", VariableKind.INPUT, ("t",)), Variable("B", VariableKind.OUTPUT, ("x", "y", "z"))),
        (Rule("r", (P("A"),), (P("B", "x"), P("B", "y"), P("B", "z")), 0.5),),
    )
    assert len(normalize_model(m)) == 3


def test_rule_invariants():
    with pytest.raises(ValueError):
        Rule("r", (P("A"),), (P("A"),), 0.5)
    with pytest.raises(ValueError):
        Rule("r", (P("A"),), (P("B"),), -0.1)
    with pytest.raises(ValueError):
        Rule("r", (P("A"),), (P("B"),), 0.5, kind=RuleKind.FACT)


def test_without_rules():
    m = load("casestudy.yaml")
    assert [r.id for r in m.without_rules(["R9"]).rules] == [f"R{i}" for i in (1, 2, 3, 4, 5, 6, 7, 8, 10)]
    with pytest.raises(SchemaError, match="R99"):
        m.without_rules(["R99"])


def test_json_documents_are_accepted():
    import json
    import yaml
    doc = yaml.safe_load(fixture_text("redundancy.yaml"))
    assert parse_model(json.dumps(doc)) == load("redundancy.yaml")
