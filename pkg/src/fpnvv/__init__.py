"""Verification and validation of fuzzy rule bases through fuzzy Petri nets."""

__version__ = "0.1.0"

from .fpn import FuzzyPetriNet, Place, Transition, build_fpn, export_dot
from .inference import InferenceConfig, InferenceError, TruthAssignment, apply_clause, forward_chain
from .reachability import (Marking, ReachabilityGraph, build_reachability_graph,
                           enabled_transitions, graph_to_dot, initial_marking)
from .rulebase import (BehaviorModel, Connective, HornClause, ParseError, Proposition, Rule,
                       RuleBaseError, RuleKind, SchemaError, Variable, VariableKind,
                       normalize, normalize_model, parse_model)
from .validation import (Base, DynamicReport, ReferenceValue, Relation, StaticReport,
                         ValidationInputError, ValidationReferent, Verdict, dynamic_validate,
                         parse_referent, static_validate)
from .verification import (Finding, FindingKind, Severity, VerificationReport, analyze,
                           detect_circularity, detect_inconsistency, detect_incompleteness,
                           detect_redundancy, verify)
