"""Import the tense/aspect content of TimeML documents as RTMML annotations.

TimeML's ``tense`` attribute constrains S against E, and ``aspect`` only
separates E<R (PERFECTIVE) from the merged case E=R or E>R.  Nothing in
TimeML constrains S against R, so imported verbs carry partial relation
sets and no view/tense.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Optional

from .algebra import AFTER, BEFORE, EQUAL, FULL, RelationSet
from .model import AnnotatedDocument, DocAnn, TimeRefAnn, VerbAnn
from .tokenizer import tokenize

__all__ = ["TimemlEventInstance", "TimemlError", "import_timeml", "read_timeml_instances"]

SE_BY_TENSE = {"PAST": AFTER, "PRESENT": EQUAL, "FUTURE": BEFORE}
ER_BY_ASPECT = {"PERFECTIVE": BEFORE, "NONE": RelationSet("=>")}


class TimemlError(ValueError):
    pass


@dataclass(frozen=True)
class TimemlEventInstance:
    event_id: str
    instance_id: str
    target: tuple[int, ...]
    tense: str
    aspect: str
    pos: str


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _text_spans(container: ET.Element) -> tuple[str, dict[str, tuple[ET.Element, int, int]]]:
    """Flatten inline markup to text, recording where EVENT/TIMEX3 elements sit."""
    parts: list[str] = []
    pos = 0
    spans: dict[str, tuple[ET.Element, int, int]] = {}

    def walk(elem: ET.Element) -> None:
        nonlocal pos
        start = pos
        if elem.text:
            parts.append(elem.text)
            pos += len(elem.text)
        for child in elem:
            walk(child)
            if child.tail:
                parts.append(child.tail)
                pos += len(child.tail)
        tag = _local(elem.tag)
        key = elem.get("eid") if tag == "EVENT" else elem.get("tid") if tag == "TIMEX3" else None
        if key:
            spans[key] = (elem, start, pos)

    walk(container)
    return "".join(parts), spans


def _token_span(tokens, start: int, end: int) -> tuple[int, ...]:
    return tuple(t.index for t in tokens if t.char_start < end and t.char_end > start)


def read_timeml_instances(xml_text: str):
    """Parse TimeML into (text, tokens, event instances, timexes, creation time, warnings)."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise TimemlError(f"malformed XML: {exc}") from None

    text_elem = next((e for e in root.iter() if _local(e.tag) == "TEXT"), None)
    container = text_elem if text_elem is not None else root
    raw, spans = _text_spans(container)
    lead = len(raw) - len(raw.lstrip())
    text = raw.strip()
    tokens = tokenize(text)

    def target(start: int, end: int) -> tuple[int, ...]:
        return _token_span(tokens, start - lead, end - lead)

    creation: Optional[str] = None
    timexes: list[TimeRefAnn] = []
    for elem in root.iter():
        if _local(elem.tag) != "TIMEX3":
            continue
        tid = elem.get("tid")
        if elem.get("functionInDocument") == "CREATION_TIME":
            creation = creation or elem.get("value")
            continue
        if tid in spans:
            _, start, end = spans[tid]
            tgt = target(start, end)
            if tgt:
                timexes.append(TimeRefAnn(tid, tgt, elem.get("value")))

    warnings: list[str] = []
    instances: list[TimemlEventInstance] = []
    seen_events = set()
    for elem in root.iter():
        if _local(elem.tag) != "MAKEINSTANCE":
            continue
        eid = elem.get("eventID")
        seen_events.add(eid)
        if eid not in spans:
            warnings.append(f"MAKEINSTANCE {elem.get('eiid')} refers to unknown event {eid}")
            continue
        _, start, end = spans[eid]
        instances.append(
            TimemlEventInstance(
                event_id=eid,
                instance_id=elem.get("eiid") or eid,
                target=target(start, end),
                tense=(elem.get("tense") or "NONE").upper(),
                aspect=(elem.get("aspect") or "NONE").upper(),
                pos=(elem.get("pos") or "").upper(),
            )
        )
    for key, (elem, _, _) in spans.items():
        if _local(elem.tag) == "EVENT" and key not in seen_events:
            warnings.append(f"EVENT {key} has no MAKEINSTANCE; skipped")
    return text, tokens, instances, timexes, creation, warnings


def import_timeml(xml_text: str, warnings: Optional[list[str]] = None) -> AnnotatedDocument:
    """Convert TimeML verb events and time expressions to an RTMML document.

    Only ``pos="VERB"`` instances become verbs.  Their ids are the event
    instance ids; timerefx ids are the TIMEX3 tids.  TLINKs are ignored.
    """
    text, tokens, instances, timexes, creation, notes = read_timeml_instances(xml_text)
    if warnings is not None:
        warnings.extend(notes)
    verbs = []
    for inst in instances:
        if inst.pos != "VERB":
            continue
        if not inst.target:
            if warnings is not None:
                warnings.append(f"{inst.instance_id} covers no tokens; skipped")
            continue
        verbs.append(
            VerbAnn(
                id=inst.instance_id,
                target=inst.target,
                se=SE_BY_TENSE.get(inst.tense, FULL),
                er=ER_BY_ASPECT.get(inst.aspect, FULL),
            )
        )
    return AnnotatedDocument(
        text=text,
        tokens=tuple(tokens),
        doc=DocAnn(time=creation),
        verbs=tuple(verbs),
        timerefxs=tuple(timexes),
    )
