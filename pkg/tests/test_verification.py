import pytest

from fpnvv.rulebase import BehaviorModel, HornClause, Proposition, normalize_model
from fpnvv.verification import (FindingKind as K, Severity, analyze, detect_circularity,
                                detect_redundancy, verify)

from helpers import load


def kinds_and_rules(findings):
    return {(f.kind, f.rules) for f in findings}


def test_incompleteness_toy():
    a = analyze(load("incompleteness.yaml"))
    from fpnvv.verification import detect_incompleteness
    found = detect_incompleteness(a.net, a.clauses, a.model)
    assert {(f.kind, f.rules, f.places[0].label) for f in found} == {
        (K.DANGLING_ANTECEDENT, ("r2",), "P3(true)"),
        (K.DEAD_END_CONSEQUENT, ("r3",), "P4(true)"),
    }


def test_inconsistency_toy():
    a = analyze(load("inconsistency.yaml"))
    from fpnvv.verification import detect_inconsistency
    (f,) = detect_inconsistency(a.net, a.graph, a.clauses)
    assert f.kind is K.EXPLICIT_INCONSISTENCY and f.severity is Severity.ERROR
    assert set(f.rules) == {"r1", "r2", "r3"}
    assert {p.label for p in f.places} == {"P5(true)", "~P5(true)"}
    assert "via r1, r2" in f.message and "via r3" in f.message


def test_circularity_toy():
    (f,) = detect_circularity(normalize_model(load("circularity.yaml")))
    assert f.kind is K.CIRCULARITY
    assert f.rules == ("r1", "r2", "r3")


def test_self_rule_is_a_cycle():
    p = Proposition("P1", "t")
    (f,) = detect_circularity([HornClause("r", (p,), p, 1.0)])
    assert f.rules == ("r",)


def test_redundancy_toy():
    found = detect_redundancy(normalize_model(load("redundancy.yaml")))
    assert kinds_and_rules(found) == {
        (K.DUPLICATE, ("r1", "r2")),
        (K.SUBSUMED_BY_CONDITION, ("r1", "r3")),
        (K.SUBSUMED_BY_CONDITION, ("r2", "r3")),
        (K.SUBSUMED_BY_CONCLUSION, ("r4", "r5")),
    }


def test_cf_difference_reported_not_suppressed():
    p, q = Proposition("A", "t"), Proposition("B", "t")
    found = detect_redundancy([HornClause("x", (p,), q, 0.5), HornClause("y", (p,), q, 0.9)])
    (f,) = found
    assert f.kind is K.DUPLICATE and "cf 0.5 vs 0.9" in f.message


def test_clause_level_overlap_is_a_duplicate():
    a, b, c = (Proposition(v, "t") for v in "ABC")
    clauses = [HornClause("x", (a,), c, 1.0), HornClause("x", (b,), c, 1.0),
               HornClause("y", (a,), c, 1.0)]
    assert kinds_and_rules(detect_redundancy(clauses)) == {(K.DUPLICATE, ("x", "y"))}


def test_case_study_verdict():
    report = verify(load("casestudy.yaml"))
    (f,) = report.findings
    assert f.kind is K.CANDIDATE_INCONSISTENCY and f.severity is Severity.WARNING
    assert set(f.rules) == {"R4", "R9"}
    assert {p.label for p in f.places} == {"Att(m)", "Att(l)"}
    assert {p.index for p in f.places} == {24, 25}
    assert not report.has_errors
    assert report.graph_summary["nodes"] == 3 and not report.graph_summary["has_loop"]


def test_refined_case_study_is_clean():
    report = verify(load("casestudy.yaml").without_rules(["R9"]))
    assert report.findings == ()


def test_combined_toys():
    report = verify(load("structural_errors.yaml"))
    assert len(report.findings) >= 7
    assert {f.kind.category for f in report.findings} == {
        "incompleteness", "inconsistency", "circularity", "redundancy"}
    # same as running each toy on its own
    per_toy = 0
    for name in ("incompleteness", "inconsistency", "circularity", "redundancy"):
        per_toy += len(verify(load(f"{name}.yaml")).findings)
    assert len(report.findings) == per_toy == 8


def test_findings_sorted_and_deterministic():
    a = verify(load("structural_errors.yaml"))
    b = verify(load("structural_errors.yaml"))
    assert a == b
    keys = [f.sort_key() for f in a.findings]
    assert keys == sorted(keys)


def test_empty_model_has_no_findings():
    assert verify(BehaviorModel("empty")).findings == ()


def test_single_chain_is_consistent():
    doc_model = load("circularity.yaml").without_rules(["r3"])
    assert analyze(doc_model).report.of_kind(K.EXPLICIT_INCONSISTENCY, K.CANDIDATE_INCONSISTENCY) == []


def test_text_and_dict_forms():
    report = verify(load("casestudy.yaml"))
    lines = report.to_text().splitlines()
    assert lines[1].startswith("inconsistency/candidate | warning | R4, R9, P24:Att(m), P25:Att(l) |")
    d = report.to_dict()
    assert d["findings"][0]["rules"] == ["R4", "R9"]
    assert d["graph_summary"]["steps"][1] == ["R5", "R10"]


@pytest.mark.parametrize("name", ["casestudy.yaml", "referent.yaml"])
def test_finding_subjects_exist(name):
    a = analyze(load(name))
    rule_ids = {r.id for r in a.model.rules}
    for f in a.report.findings:
        assert set(f.rules) <= rule_ids
        for p in f.places:
            assert a.net.label(p.index) == p.label
