"""Command-line front end.

Exit codes: 0 clean, 1 findings or failed assertions, 2 usage, parse or
schema errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence, TextIO

from . import __version__
from .fpn import build_fpn, export_dot
from .inference import InferenceConfig, InferenceError, TruthAssignment, forward_chain
from .reachability import build_reachability_graph, graph_to_dot, initial_marking
from .rulebase import RuleBaseError, normalize_model
from .validation import (ValidationInputError, dynamic_validate, parse_inputs,
                         parse_referent, static_validate)
from .verification import analyze

FORMAT_VERSION = 1
FORMAT_ENV = "FPNVV_FORMAT"

EXIT_OK, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _unit(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if value < 0.0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return value


def _rule_list(text: str) -> list[str]:
    return [r.strip() for r in text.split(",") if r.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fpnvv", description="Verify and validate fuzzy rule bases "
                     "through fuzzy Petri nets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("model", type=Path, help="model document (YAML or JSON)")
        p.add_argument("--format", choices=("text", "structured"), default=None,
                       help=f"report format (default text, or ${FORMAT_ENV})")
        p.add_argument("--drop-rules", type=_rule_list, action="extend", default=[],
                       metavar="IDS", help="comma-separated rule ids to remove before analysis")

    p = sub.add_parser("verify", help="structural verification")
    common(p)
    p.add_argument("--dot", type=Path, help="also write the reachability graph as DOT here")

    p = sub.add_parser("validate-static", help="compare model against a referent")
    common(p)
    p.add_argument("referent", type=Path)

    p = sub.add_parser("validate-dynamic", help="check the referent's reference values")
    common(p)
    p.add_argument("referent", type=Path)
    p.add_argument("--use-base", choices=("referent", "model"), default="referent")
    p.add_argument("--threshold", type=_unit, default=0.0)
    p.add_argument("--epsilon", type=_non_negative, default=0.0)

    p = sub.add_parser("reason", help="forward-chain the model on given input degrees")
    common(p)
    p.add_argument("inputs", type=Path, help="inputs document: list of {var, term, degree}")
    p.add_argument("--threshold", type=_unit, default=0.0)

    p = sub.add_parser("export-dot", help="render the net as Graphviz DOT")
    common(p)
    p.add_argument("--marking", choices=("none", "initial", "final"), default="none")
    p.add_argument("--dot", type=Path, help="write here instead of standard output")
    return parser


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _load_model(path: Path, drop: Sequence[str]):
    # a referent document is a model document with reference values attached
    try:
        model = parse_referent(_read(path)).model
        return model.without_rules(drop) if drop else model
    except RuleBaseError as exc:
        raise RuleBaseError(f"{path}: {exc}") from None


def _load_referent(path: Path):
    try:
        return parse_referent(_read(path))
    except RuleBaseError as exc:
        raise RuleBaseError(f"{path}: {exc}") from None


def _emit(out: TextIO, fmt: str, command: str, payload: dict[str, Any], text: str) -> None:
    if fmt == "structured":
        doc = {"format_version": FORMAT_VERSION, "command": command, **payload}
        out.write(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write(text)


def _cmd_verify(args, fmt, out) -> int:
    analysis = analyze(_load_model(args.model, args.drop_rules))
    if args.dot:
        args.dot.write_text(graph_to_dot(analysis.graph, analysis.net), encoding="utf-8")
    report = analysis.report
    _emit(out, fmt, "verify", report.to_dict(), report.to_text())
    return EXIT_FINDINGS if report.findings else EXIT_OK


def _cmd_validate_static(args, fmt, out) -> int:
    model = _load_model(args.model, args.drop_rules)
    referent = _load_referent(args.referent)
    report = static_validate(model, referent)
    _emit(out, fmt, "validate-static", report.to_dict(), report.to_text())
    return EXIT_OK if report.clean else EXIT_FINDINGS


def _cmd_validate_dynamic(args, fmt, out) -> int:
    model = _load_model(args.model, args.drop_rules)
    referent = _load_referent(args.referent)
    cfg = InferenceConfig(threshold=args.threshold, epsilon=args.epsilon)
    report = dynamic_validate(args.use_base, model, referent, cfg)
    _emit(out, fmt, "validate-dynamic", report.to_dict(), report.to_text())
    return EXIT_OK if report.all_pass else EXIT_FINDINGS


def _cmd_reason(args, fmt, out) -> int:
    model = _load_model(args.model, args.drop_rules)
    try:
        givens = parse_inputs(_read(args.inputs))
    except RuleBaseError as exc:
        raise RuleBaseError(f"{args.inputs}: {exc}") from None
    clauses = normalize_model(model)
    net = build_fpn(clauses, model)
    try:
        inputs = TruthAssignment.from_propositions(net, givens)
    except KeyError as exc:
        raise ValidationInputError(f"{args.inputs}: {exc.args[0]} is not a place of the net") from None
    alpha = forward_chain(net, clauses, inputs, InferenceConfig(threshold=args.threshold))
    rows = []
    for place in net.places:
        trace = [c.source_rule for c in alpha.derivation(place.index)]
        rows.append({"place": place.index, "proposition": place.label,
                     "degree": alpha[place.index], "trace": list(dict.fromkeys(trace))})
    width = max((len(r["proposition"]) for r in rows), default=0)
    text = "".join(f"P{r['place']:<3} {r['proposition'].ljust(width)}  {r['degree']:.10g}"
                   + (f"  via {', '.join(r['trace'])}" if r["trace"] else "") + "\n"
                   for r in rows)
    _emit(out, fmt, "reason", {"model_ref": model.name, "degrees": rows}, text)
    return EXIT_OK


def _cmd_export_dot(args, fmt, out) -> int:
    model = _load_model(args.model, args.drop_rules)
    net = build_fpn(normalize_model(model), model)
    marking = None
    if args.marking != "none":
        root = initial_marking(net, model)
        marking = root if args.marking == "initial" else build_reachability_graph(net, root).final
    dot = export_dot(net, marking)
    if args.dot:
        args.dot.write_text(dot, encoding="utf-8")
    else:
        out.write(dot)
    return EXIT_OK


_COMMANDS = {
    "verify": _cmd_verify,
    "validate-static": _cmd_validate_static,
    "validate-dynamic": _cmd_validate_dynamic,
    "reason": _cmd_reason,
    "export-dot": _cmd_export_dot,
}


def run(argv: Sequence[str] | None = None, out: TextIO | None = None,
        err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format or os.environ.get(FORMAT_ENV, "text")
        if fmt not in ("text", "structured"):
            raise UsageError(f"{FORMAT_ENV}={fmt!r}: expected text or structured")
        return _COMMANDS[args.command](args, fmt, out)
    except UsageError as exc:
        err.write(f"fpnvv: usage error: {exc}\n")
    except (RuleBaseError, ValidationInputError, InferenceError) as exc:
        err.write(f"fpnvv: error: {exc}\n")
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
