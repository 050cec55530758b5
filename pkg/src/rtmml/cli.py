"""Command-line front end.

Exit codes: 0 success, 1 validation errors, 2 I/O or parse failure,
3 temporally inconsistent annotation.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .graph import InconsistentAnnotation, build_graph
from .model import TimePointId
from .parser import RTMMLParseError, read_rtmml, serialize_rtmml, validate
from .reasoner import anchor_report, close, event_order, query_relation
from .timeml import TimemlError, import_timeml

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_INCONSISTENT = 3


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        _err(f"error: cannot read {path}: {exc}")
        raise _Exit(EXIT_IO)


def _load(args):
    """Read, validate, build and close; any failure exits with its code."""
    text = _read(args.path)
    try:
        doc, report = read_rtmml(text, strict=args.strict)
    except RTMMLParseError as exc:
        _err(f"error: {exc}")
        raise _Exit(EXIT_IO)
    report.extend(validate(doc))
    if not report.valid:
        sys.stderr.write(report.to_text())
        raise _Exit(EXIT_INVALID)
    try:
        graph = build_graph(doc)
    except InconsistentAnnotation as exc:
        _err(f"error: {exc}")
        raise _Exit(EXIT_INCONSISTENT)
    return doc, close(graph)


def _report_conflict(res, as_json: bool) -> None:
    c = res.conflict
    if as_json:
        print(res.to_json())
    _err(
        "error: INCONSISTENT triangle "
        + " ".join(str(p) for p in c.triangle)
        + (f" (from {', '.join(c.provenance)})" if c.provenance else "")
    )


def cmd_validate(args) -> int:
    text = _read(args.path)
    try:
        doc, report = read_rtmml(text, strict=args.strict)
    except RTMMLParseError as exc:
        _err(f"error: {exc}")
        return EXIT_IO
    report.extend(validate(doc))
    if args.json:
        sys.stderr.write(report.to_json() + "\n")
    else:
        sys.stderr.write(report.to_text())
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_close(args) -> int:
    _, res = _load(args)
    if not res.consistent:
        _report_conflict(res, as_json=args.format == "json")
        return EXIT_INCONSISTENT
    if args.format == "dot":
        sys.stdout.write(res.graph.to_dot())
    else:
        out = res.to_dict()
        if args.anchors:
            out["anchor_report"] = [f.to_dict() for f in anchor_report(res)]
        print(json.dumps(out, indent=2, ensure_ascii=False))
    return EXIT_OK


def cmd_order(args) -> int:
    _, res = _load(args)
    if not res.consistent:
        _report_conflict(res, as_json=args.json)
        return EXIT_INCONSISTENT
    order = event_order(res, include_times=args.include_times)
    if args.format == "dot":
        sys.stdout.write(order.to_dot())
    elif args.json:
        print(order.to_json())
    else:
        sys.stdout.write(order.to_text())
    return EXIT_OK


def cmd_query(args) -> int:
    _, res = _load(args)
    if not res.consistent:
        _report_conflict(res, as_json=args.json)
        return EXIT_INCONSISTENT
    try:
        a = TimePointId.parse(args.point_a)
        b = TimePointId.parse(args.point_b)
        rel = query_relation(res, a, b)
    except (ValueError, KeyError) as exc:
        _err(f"error: {exc.args[0] if exc.args else exc}")
        return EXIT_IO
    if args.json:
        print(json.dumps({"a": str(a), "b": str(b), "rel": str(rel)}))
    else:
        print(rel)
    return EXIT_OK


def cmd_from_timeml(args) -> int:
    text = _read(args.path)
    warnings: list[str] = []
    try:
        doc = import_timeml(text, warnings)
    except TimemlError as exc:
        _err(f"error: {exc}")
        return EXIT_IO
    for w in warnings:
        _err(f"warning: {w}")
    sys.stdout.write(serialize_rtmml(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="structured JSON output")
    common.add_argument(
        "--strict", action="store_true", default=argparse.SUPPRESS, help="reject unknown elements and attributes"
    )

    parser = argparse.ArgumentParser(prog="rtmml", description="Reason over RTMML tense annotations.")
    parser.add_argument("--json", action="store_true", help="structured JSON output")
    parser.add_argument("--strict", action="store_true", help="reject unknown elements and attributes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check an RTMML file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("close", parents=[common], help="print the closed constraint graph")
    p.add_argument("path")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--anchors", action="store_true", help="include the calendar anchor report")
    p.set_defaults(func=cmd_close)

    p = sub.add_parser("order", parents=[common], help="print the event ordering")
    p.add_argument("path")
    p.add_argument("--include-times", action="store_true", help="order time expressions too")
    p.add_argument("--format", choices=("text", "dot"), default="text")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("query", parents=[common], help="relation between two points")
    p.add_argument("path")
    p.add_argument("point_a", help="SD, <verb>.s|e|r, <timex id> or @label")
    p.add_argument("point_b")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("from-timeml", parents=[common], help="convert TimeML to RTMML")
    p.add_argument("path")
    p.set_defaults(func=cmd_from_timeml)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
