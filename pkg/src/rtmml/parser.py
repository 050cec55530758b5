"""Reading, writing and checking RTMML XML documents."""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional
from xml.sax.saxutils import escape

from .algebra import (
    FULL,
    RelationSet,
    Tense,
    View,
    compose,
    converse,
    er_for_view,
    intersect,
    sr_for_tense,
)
from .model import (
    LINK_KINDS,
    AnnotatedDocument,
    DocAnn,
    LinkAnn,
    PointRef,
    TimeRefAnn,
    VerbAnn,
)
from .tokenizer import TargetError, format_target, resolve_target, tokenize

__all__ = [
    "Issue",
    "ValidationReport",
    "RTMMLParseError",
    "RTMMLValidationError",
    "read_rtmml",
    "parse_rtmml",
    "serialize_rtmml",
    "validate",
    "TIME_VALUE",
]

XML_ID = "{http://www.w3.org/XML/1998/namespace}id"

TIME_VALUE = re.compile(
    r"^(now|\d{4}(-\d{2}(-\d{2}(T\d{2}:\d{2}(:\d{2}(\.\d+)?)?)?)?)?)$"
)

_KNOWN_ATTRS = {
    "seg": {"type"},
    "doc": {"id", "time", "mod"},
    "timerefx": {"id", "target", "value"},
    "verb": {"id", "target", "view", "tense", "se", "er", "sr", "s", "e", "r"},
    "rtmlink": {"id", "type", "source", "target"},
    "link": {"source", "target"},
}

# Relation attributes are often written with a raw '<', which XML forbids.
_RAW_RELATION_ATTR = re.compile(r"""(\b(?:se|er|sr)\s*=\s*)(["'])([<=>\s]*)\2""")


class RTMMLParseError(ValueError):
    """The input is not a readable RTMML document."""


@dataclass(frozen=True)
class Issue:
    severity: str
    code: str
    location: str
    message: str

    def to_text(self) -> str:
        return f"{self.severity} {self.code} {self.location} {self.message}"

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "location": self.location,
            "message": self.message,
        }


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    def add(self, severity: str, code: str, location: str, message: str) -> None:
        self.issues.append(Issue(severity, code, location, message))

    def error(self, code: str, location: str, message: str) -> None:
        self.add("error", code, location, message)

    def warning(self, code: str, location: str, message: str) -> None:
        self.add("warning", code, location, message)

    def extend(self, other: "ValidationReport") -> None:
        self.issues.extend(other.issues)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def valid(self) -> bool:
        return not self.errors

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]

    def to_text(self) -> str:
        return "".join(i.to_text() + "\n" for i in self.issues)

    def to_dict(self) -> dict:
        return {"valid": self.valid, "issues": [i.to_dict() for i in self.issues]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class RTMMLValidationError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        first = report.errors[0].to_text() if report.errors else "invalid document"
        super().__init__(first)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _attrs(elem: ET.Element) -> dict[str, str]:
    out = {}
    for key, value in elem.attrib.items():
        out["id" if key == XML_ID else _local(key)] = value
    return out


def _entity_refs(value: str) -> list[str]:
    return [ref.lstrip("#") for ref in value.replace(",", " ").split()]


def _relation(value: Optional[str], where: str, name: str) -> Optional[RelationSet]:
    if value is None:
        return None
    try:
        return RelationSet.parse(value)
    except ValueError as exc:
        raise RTMMLParseError(f"{where}: bad {name} attribute: {exc}") from None


def _target(value: Optional[str], where: str, strict: bool) -> tuple[int, ...]:
    if value is None:
        raise RTMMLParseError(f"{where}: missing target attribute")
    try:
        return resolve_target(value, None, strict=strict)
    except TargetError as exc:
        raise RTMMLParseError(f"{where}: {exc}") from None


def _document_text(root: ET.Element) -> str:
    parts = [root.text or ""]
    parts.extend(child.tail or "" for child in root)
    return "".join(parts).strip()


def read_rtmml(xml_text: str, strict: bool = False) -> tuple[AnnotatedDocument, ValidationReport]:
    """Parse RTMML into a document plus the warnings raised while reading.

    Reference resolution is left to :func:`validate`; only syntax problems
    raise :class:`RTMMLParseError` here.
    """
    report = ValidationReport()
    if not strict:
        xml_text = _RAW_RELATION_ATTR.sub(
            lambda m: m.group(1) + m.group(2) + escape(m.group(3)) + m.group(2), xml_text
        )
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise RTMMLParseError(f"malformed XML: {exc}") from None
    if _local(root.tag) != "rtmml":
        raise RTMMLParseError(f"root element must be <rtmml>, got <{_local(root.tag)}>")

    def unknown(code: str, where: str, message: str) -> None:
        if strict:
            raise RTMMLParseError(f"{where}: {message}")
        report.warning(code, where, message)

    def check_attrs(elem: ET.Element, where: str) -> dict[str, str]:
        attrs = _attrs(elem)
        tag = _local(elem.tag)
        for key in attrs:
            if key not in _KNOWN_ATTRS[tag]:
                unknown("UNKNOWN_ATTRIBUTE", where, f"unknown attribute {key!r} on <{tag}>")
        return attrs

    text = _document_text(root)
    seen_ids: set[str] = set()
    doc = DocAnn()
    doc_seen = False
    verbs_raw: list[tuple[dict[str, str], str]] = []
    timerefxs: list[TimeRefAnn] = []
    links: list[LinkAnn] = []

    def claim(ident: Optional[str], tag: str) -> str:
        if not ident:
            raise RTMMLParseError(f"<{tag}> without xml:id")
        if ident in seen_ids:
            raise RTMMLParseError(f"duplicate xml:id {ident!r}")
        seen_ids.add(ident)
        return ident

    for child in root:
        tag = _local(child.tag)
        if tag not in _KNOWN_ATTRS or tag == "link":
            unknown("UNKNOWN_ELEMENT", tag, f"unknown element <{tag}>")
            continue
        attrs = check_attrs(child, _attrs(child).get("id", tag))
        if tag == "seg":
            seg_type = attrs.get("type", "token")
            if seg_type != "token":
                raise RTMMLParseError(f"unsupported segmentation type {seg_type!r}")
        elif tag == "doc":
            if doc_seen:
                raise RTMMLParseError("more than one <doc> element")
            doc_seen = True
            if "id" in attrs:
                claim(attrs["id"], tag)
            doc = DocAnn(time=attrs.get("time"), mod=attrs.get("mod"))
        elif tag == "timerefx":
            ident = claim(attrs.get("id"), tag)
            timerefxs.append(
                TimeRefAnn(ident, _target(attrs.get("target"), ident, strict), attrs.get("value"))
            )
        elif tag == "verb":
            ident = claim(attrs.get("id"), tag)
            verbs_raw.append((attrs, ident))
        elif tag == "rtmlink":
            links.append(_read_link(child, attrs, claim(attrs.get("id"), tag), check_attrs, unknown))

    timex_ids = {t.id for t in timerefxs}
    verb_ids = {ident for _, ident in verbs_raw}
    verbs = [_read_verb(attrs, ident, strict, timex_ids, verb_ids) for attrs, ident in verbs_raw]

    fixed_links = []
    for link in links:
        if link.kind == "POSITIONS" and link.source is None:
            timex_targets = [t for t in link.targets if t in timex_ids]
            if len(timex_targets) == 1 and len(link.targets) > 1:
                source = timex_targets[0]
                link = replace(link, source=source, targets=tuple(t for t in link.targets if t != source))
                report.warning(
                    "POSITIONS_SOURCE_INFERRED",
                    link.id,
                    f"no source given; using time expression {source!r} as source",
                )
        fixed_links.append(link)

    document = AnnotatedDocument(
        text=text,
        tokens=tuple(tokenize(text)),
        doc=doc,
        verbs=tuple(verbs),
        timerefxs=tuple(timerefxs),
        links=tuple(fixed_links),
    )
    return document, report


def _read_link(elem, attrs, ident, check_attrs, unknown) -> LinkAnn:
    kind = attrs.get("type")
    if kind is None:
        raise RTMMLParseError(f"{ident}: <rtmlink> without type attribute")
    kind = kind.upper()
    if kind not in LINK_KINDS:
        raise RTMMLParseError(f"{ident}: unknown link type {attrs['type']!r}")
    sources: list[str] = _entity_refs(attrs.get("source", ""))
    targets: list[str] = _entity_refs(attrs.get("target", ""))
    for sub in elem:
        if _local(sub.tag) != "link":
            unknown("UNKNOWN_ELEMENT", ident, f"unknown element <{_local(sub.tag)}> in <rtmlink>")
            continue
        sub_attrs = check_attrs(sub, ident)
        sources.extend(_entity_refs(sub_attrs.get("source", "")))
        targets.extend(_entity_refs(sub_attrs.get("target", "")))
    sources = list(dict.fromkeys(sources))
    targets = list(dict.fromkeys(t for t in targets if t not in sources))
    if len(sources) > 1:
        raise RTMMLParseError(f"{ident}: more than one link source")
    return LinkAnn(ident, kind, sources[0] if sources else None, tuple(targets))


def _read_verb(attrs, ident, strict, timex_ids, verb_ids) -> VerbAnn:
    try:
        view = View(attrs["view"]) if "view" in attrs else None
        tense = Tense(attrs["tense"]) if "tense" in attrs else None
    except ValueError as exc:
        raise RTMMLParseError(f"{ident}: {exc}") from None
    refs = {
        k: PointRef.parse(attrs[k], timex_ids, verb_ids) if k in attrs else None
        for k in ("s", "e", "r")
    }
    return VerbAnn(
        id=ident,
        target=_target(attrs.get("target"), ident, strict),
        view=view,
        tense=tense,
        se=_relation(attrs.get("se"), ident, "se"),
        er=_relation(attrs.get("er"), ident, "er"),
        sr=_relation(attrs.get("sr"), ident, "sr"),
        **refs,
    )


def parse_rtmml(xml_text: str, strict: bool = False, check: bool = True) -> AnnotatedDocument:
    """Parse an RTMML document.

    With ``check`` set the document is also validated and
    :class:`RTMMLValidationError` is raised if any error-level issue is found.
    """
    document, report = read_rtmml(xml_text, strict=strict)
    if check:
        report.extend(validate(document))
        if not report.valid:
            raise RTMMLValidationError(report)
    return document


def _quote(value: str) -> str:
    # '>' is legal in attribute values and keeps relation strings readable
    return '"' + value.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;") + '"'


def _attr_line(tag: str, pairs: Iterable[tuple[str, Optional[str]]], close: str = " />") -> str:
    body = "".join(f" {k}={_quote(v)}" for k, v in pairs if v is not None)
    return f"<{tag}{body}{close}"


def serialize_rtmml(doc: AnnotatedDocument) -> str:
    """Canonical RTMML text for a document."""
    lines = ["<rtmml>"]
    if doc.text:
        lines.append(escape(doc.text))
    lines.append('<seg type="token" />')
    if doc.doc.time is not None or doc.doc.mod is not None:
        lines.append(_attr_line("doc", [("time", doc.doc.time), ("mod", doc.doc.mod)]))
    for t in doc.timerefxs:
        lines.append(
            _attr_line("timerefx", [("xml:id", t.id), ("target", format_target(t.target)), ("value", t.value)])
        )

    def rel(r: Optional[RelationSet]) -> Optional[str]:
        return None if r is None else str(r)

    def ref(p: Optional[PointRef]) -> Optional[str]:
        return None if p is None else str(p)

    for v in doc.verbs:
        lines.append(
            _attr_line(
                "verb",
                [
                    ("xml:id", v.id),
                    ("target", format_target(v.target)),
                    ("view", v.view.value if v.view else None),
                    ("tense", v.tense.value if v.tense else None),
                    ("sr", rel(v.sr)),
                    ("er", rel(v.er)),
                    ("se", rel(v.se)),
                    ("s", ref(v.s)),
                    ("e", ref(v.e)),
                    ("r", ref(v.r)),
                ],
            )
        )
    for link in doc.links:
        lines.append(_attr_line("rtmlink", [("xml:id", link.id), ("type", link.kind)], close=">"))
        if link.source is not None:
            lines.append(f"  <link source={_quote('#' + link.source)} />")
        for t in link.targets:
            lines.append(f"  <link target={_quote('#' + t)} />")
        lines.append("</rtmlink>")
    lines.append("</rtmml>")
    return "\n".join(lines) + "\n"


def _derived_relations(verb: VerbAnn) -> tuple[RelationSet, RelationSet, RelationSet]:
    """(sr, er, se) implied by whatever of view/tense the verb carries."""
    sr = sr_for_tense(verb.tense) if verb.tense else FULL
    er = er_for_view(verb.view) if verb.view else FULL
    return sr, er, compose(sr, converse(er))


def validate(doc: AnnotatedDocument) -> ValidationReport:
    """Check references, target ranges, link shapes and tense annotations."""
    report = ValidationReport()
    n_tokens = len(doc.tokens)
    timex_ids = {t.id for t in doc.timerefxs}
    verb_ids = {v.id for v in doc.verbs}

    if doc.doc.time is not None and not TIME_VALUE.match(doc.doc.time):
        report.warning("TIME_FORMAT", "doc", f"unrecognised time value {doc.doc.time!r}")

    def check_target(ident: str, target: tuple[int, ...]) -> None:
        if not target:
            report.error("EMPTY_TARGET", ident, "target selects no tokens")
        elif target[-1] >= n_tokens:
            report.error(
                "TARGET_RANGE",
                ident,
                f"token {target[-1]} out of range (document has {n_tokens} tokens)",
            )

    for t in doc.timerefxs:
        check_target(t.id, t.target)
        if t.value is not None and not TIME_VALUE.match(t.value):
            report.warning("TIME_FORMAT", t.id, f"unrecognised time value {t.value!r}")

    for v in doc.verbs:
        check_target(v.id, v.target)
        has_tense = v.view is not None and v.tense is not None
        has_rel = any(x is not None for x in (v.se, v.er, v.sr))
        if not has_tense and not has_rel:
            if v.view is None and v.tense is None:
                report.error("MISSING_TENSE", v.id, "verb has neither view+tense nor se/er/sr")
            else:
                report.warning("INCOMPLETE_TENSE", v.id, "only one of view/tense given")
        elif (v.view is None) != (v.tense is None):
            report.warning("INCOMPLETE_TENSE", v.id, "only one of view/tense given")

        d_sr, d_er, d_se = _derived_relations(v)
        sr, er, se = d_sr, d_er, d_se
        for name, explicit, derived in (("sr", v.sr, d_sr), ("er", v.er, d_er), ("se", v.se, d_se)):
            if explicit is None:
                continue
            merged = intersect(explicit, derived)
            if not merged:
                report.error(
                    "CONTRADICTORY_TENSE",
                    v.id,
                    f"{name}={explicit} conflicts with view/tense ({name}={derived})",
                )
            if name == "sr":
                sr = merged
            elif name == "er":
                er = merged
            else:
                se = merged
        if sr and er and se and not intersect(se, compose(sr, converse(er))):
            report.error(
                "CONTRADICTORY_RELATIONS",
                v.id,
                f"sr={sr}, er={er} and se={se} cannot hold together",
            )

        for attr in ("s", "e", "r"):
            ref: Optional[PointRef] = getattr(v, attr)
            if ref is None:
                continue
            where = f"{v.id}@{attr}"
            if ref.kind == "timex" and ref.id not in timex_ids:
                report.error("DANGLING_REF", where, f"no timerefx {ref.id!r}")
            elif ref.kind == "verb":
                if ref.id not in verb_ids:
                    report.error("DANGLING_REF", where, f"no verb {ref.id!r}")
                elif ref.id == v.id and ref.point == attr:
                    report.warning("SELF_REF", where, "point refers to itself")

    for link in doc.links:
        _validate_link(link, timex_ids, verb_ids, report)
    return report


def _validate_link(link: LinkAnn, timex_ids, verb_ids, report: ValidationReport) -> None:
    entities = ([link.source] if link.source is not None else []) + list(link.targets)
    for ent in entities:
        if ent not in timex_ids and ent not in verb_ids:
            report.error("DANGLING_REF", link.id, f"link refers to unknown entity {ent!r}")
    if link.kind in ("POSITIONS", "REPORTS"):
        if link.source is None or not link.targets:
            report.error("LINK_ARITY", link.id, f"{link.kind} needs one source and at least one target")
            return
    elif link.source is None and len(link.targets) < 2:
        report.error("LINK_ARITY", link.id, "SAME_TIMEFRAME needs at least two entities")
        return
    elif link.source is not None and not link.targets:
        report.error("LINK_ARITY", link.id, "SAME_TIMEFRAME needs at least two entities")
        return

    if link.kind == "REPORTS":
        for ent in entities:
            if ent in timex_ids:
                report.error("LINK_ENTITY", link.id, f"REPORTS relates verbs, not time expression {ent!r}")
    elif link.kind == "POSITIONS":
        for tgt in link.targets:
            pair = {link.source, tgt}
            if len(pair & timex_ids) != 1 or len(pair & verb_ids) != 1:
                if pair <= (timex_ids | verb_ids):
                    report.error(
                        "LINK_ENTITY",
                        link.id,
                        f"POSITIONS pairs one time expression with one verb ({link.source}, {tgt})",
                    )
