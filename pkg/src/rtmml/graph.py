"""Compile an annotated document into a point-algebra constraint graph."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .algebra import EQUAL, FULL, RelationSet, converse, intersect, tense_to_relations
from .algebra import er_for_view, sr_for_tense
from .model import AnnotatedDocument, PointRef, TimePointId, VerbAnn

__all__ = ["ConstraintGraph", "InconsistentAnnotation", "build_graph", "add_constraint", "point_for_ref"]

SD = TimePointId.sd()


class InconsistentAnnotation(ValueError):
    """Two constraints on the same pair of points have no relation in common."""

    def __init__(self, a: TimePointId, b: TimePointId, old: RelationSet, new: RelationSet, sources):
        self.a, self.b, self.old, self.new = a, b, old, new
        self.sources = list(sources)
        super().__init__(
            f"INCONSISTENT_ANNOTATION: {a} {old} {b} contradicts {a} {new} {b} "
            f"(from {', '.join(self.sources) or 'unknown'})"
        )


@dataclass
class ConstraintGraph:
    """Time points joined by relation sets.

    Edges are stored once, keyed ``(a, b)`` with ``a < b`` in point order;
    the label is the relation of ``a`` to ``b``.  Missing edges are
    unconstrained.
    """

    nodes: set[TimePointId] = field(default_factory=set)
    edges: dict[tuple[TimePointId, TimePointId], RelationSet] = field(default_factory=dict)
    anchors: dict[TimePointId, str] = field(default_factory=dict)
    provenance: dict[tuple[TimePointId, TimePointId], list[str]] = field(default_factory=dict)
    surface: dict[TimePointId, str] = field(default_factory=dict)

    def copy(self) -> "ConstraintGraph":
        return ConstraintGraph(
            set(self.nodes),
            dict(self.edges),
            dict(self.anchors),
            {k: list(v) for k, v in self.provenance.items()},
            dict(self.surface),
        )

    def sorted_nodes(self) -> list[TimePointId]:
        return sorted(self.nodes)

    def relation(self, a: TimePointId, b: TimePointId) -> RelationSet:
        """Stored label of a relative to b, ``<=>`` when unconstrained."""
        for p in (a, b):
            if p not in self.nodes:
                raise KeyError(f"unknown time point {p}")
        if a == b:
            return EQUAL
        if a < b:
            return self.edges.get((a, b), FULL)
        return converse(self.edges.get((b, a), FULL))

    def sources(self, a: TimePointId, b: TimePointId) -> list[str]:
        key = (a, b) if a < b else (b, a)
        return list(self.provenance.get(key, []))

    def to_dict(self) -> dict:
        return {
            "nodes": [str(n) for n in self.sorted_nodes()],
            "edges": [
                {"a": str(a), "b": str(b), "rel": str(r), "provenance": list(self.provenance.get((a, b), []))}
                for (a, b), r in sorted(self.edges.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key()))
            ],
            "anchors": {str(p): v for p, v in sorted(self.anchors.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_dot(self, name: str = "rtmml") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for n in self.sorted_nodes():
            label = str(n)
            if n in self.anchors:
                label += f"\\n{self.anchors[n]}"
            lines.append(f'  "{n}" [label="{_dot_escape(label)}"];')
        for (a, b), r in sorted(self.edges.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())):
            lines.append(f'  "{a}" -> "{b}" [label="{_dot_escape(str(r))}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace('"', '\\"')


def add_constraint(
    g: ConstraintGraph,
    a: TimePointId,
    b: TimePointId,
    rel: RelationSet,
    source: Optional[str] = None,
) -> ConstraintGraph:
    """Intersect ``rel`` (a relative to b) into the graph, in place."""
    if a == b:
        if EQUAL <= rel:
            return g
        raise InconsistentAnnotation(a, b, EQUAL, rel, [source] if source else [])
    g.nodes.update((a, b))
    if b < a:
        a, b, rel = b, a, converse(rel)
    key = (a, b)
    old = g.edges.get(key, FULL)
    new = intersect(old, rel)
    prov = g.provenance.get(key, [])
    if not new:
        raise InconsistentAnnotation(a, b, old, rel, prov + ([source] if source else []))
    if not rel.is_full():
        g.edges[key] = new
        if source is not None and source not in prov:
            g.provenance[key] = prov + [source]
    return g


def point_for_ref(ref: PointRef) -> TimePointId:
    if ref.kind == "doc":
        return SD
    if ref.kind == "timex":
        return TimePointId.timex(ref.id)
    if ref.kind == "verb":
        return TimePointId.verb(ref.id, ref.point)
    return TimePointId.named(ref.id)


def _verb_points(v: VerbAnn) -> tuple[TimePointId, TimePointId, TimePointId]:
    return TimePointId.verb(v.id, "S"), TimePointId.verb(v.id, "E"), TimePointId.verb(v.id, "R")


def _tense_constraints(v: VerbAnn) -> Iterable[tuple[str, RelationSet]]:
    if v.view is not None and v.tense is not None:
        sr, er, se = tense_to_relations(v.view, v.tense)
        yield from (("sr", sr), ("er", er), ("se", se))
    elif v.tense is not None:
        yield "sr", sr_for_tense(v.tense)
    elif v.view is not None:
        yield "er", er_for_view(v.view)
    for name in ("sr", "er", "se"):
        explicit = getattr(v, name)
        if explicit is not None:
            yield name, explicit


def _entity_point(doc: AnnotatedDocument, ident: str, role: str) -> TimePointId:
    # time expressions have a single point whatever role they play
    if doc.timerefx(ident) is not None:
        return TimePointId.timex(ident)
    return TimePointId.verb(ident, role)


def build_graph(doc: AnnotatedDocument) -> ConstraintGraph:
    """Encode tense, point references, links, default speech time and anchors.

    Raises :class:`InconsistentAnnotation` when two direct constraints on
    the same pair contradict each other.
    """
    g = ConstraintGraph()
    g.nodes.add(SD)
    for v in doc.verbs:
        g.nodes.update(_verb_points(v))
    for t in doc.timerefxs:
        tp = TimePointId.timex(t.id)
        g.nodes.add(tp)
        g.surface[tp] = doc.target_text(t.target)

    for v in doc.verbs:
        s, e, r = _verb_points(v)
        pair = {"sr": (s, r), "er": (e, r), "se": (s, e)}
        for name, rel in _tense_constraints(v):
            add_constraint(g, *pair[name], rel, v.id)

    for v in doc.verbs:
        for attr, own in zip(("s", "e", "r"), _verb_points(v)):
            ref = getattr(v, attr)
            if ref is not None:
                add_constraint(g, own, point_for_ref(ref), EQUAL, v.id)

    reported: set[str] = set()
    for link in doc.links:
        if link.kind == "POSITIONS":
            for tgt in link.targets:
                a, b = link.source, tgt
                if doc.timerefx(a) is None and doc.timerefx(b) is not None:
                    a, b = b, a
                add_constraint(g, _entity_point(doc, a, "R"), _entity_point(doc, b, "R"), EQUAL, link.id)
        elif link.kind == "SAME_TIMEFRAME":
            members = ([link.source] if link.source else []) + list(link.targets)
            points = [_entity_point(doc, m, "R") for m in members]
            for i in range(len(points)):
                for j in range(i + 1, len(points)):
                    add_constraint(g, points[i], points[j], EQUAL, link.id)
        elif link.kind == "REPORTS":
            for tgt in link.targets:
                add_constraint(
                    g, TimePointId.verb(link.source, "E"), TimePointId.verb(tgt, "S"), EQUAL, link.id
                )
                reported.add(tgt)

    for v in doc.verbs:
        if v.s is None and v.id not in reported:
            add_constraint(g, TimePointId.verb(v.id, "S"), SD, EQUAL, "default-speech-time")

    if doc.doc.time is not None:
        g.anchors[SD] = doc.doc.time
    for t in doc.timerefxs:
        if t.value is not None:
            g.anchors[TimePointId.timex(t.id)] = t.value
    return g
