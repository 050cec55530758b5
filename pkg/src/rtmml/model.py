"""Domain types for RTMML documents and their time points."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .algebra import RelationSet, Tense, View

__all__ = [
    "Token",
    "PointRef",
    "DocAnn",
    "VerbAnn",
    "TimeRefAnn",
    "LinkAnn",
    "LinkKind",
    "TimePointId",
    "AnnotatedDocument",
    "natural_key",
]

LINK_KINDS = ("POSITIONS", "SAME_TIMEFRAME", "REPORTS")
LinkKind = str

_ID_LIKE = re.compile(r"^[tvl]\d+$")
_VERB_POINT = re.compile(r"^#([^.\s#]+)\.([serSER])$")


def natural_key(text: str) -> tuple:
    """Sort key that orders ``v2`` before ``v10``."""
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", text))


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class PointRef:
    """Reference to a time point from a verb's ``s``/``e``/``r`` attribute.

    kind is one of ``doc``, ``timex``, ``verb`` or ``named``.  For ``verb``
    references ``point`` holds ``s``, ``e`` or ``r``.
    """

    kind: str
    id: str = ""
    point: Optional[str] = None

    @classmethod
    def parse(cls, text: str, timex_ids=(), verb_ids=()) -> "PointRef":
        """Classify a reference string against the declared annotation ids.

        A bare string that names no timerefx is a named point unless it has
        the shape of an annotation id (``t3``, ``v2``, ``#x``), in which case
        it stays a dangling timex reference for the validator to flag.
        """
        text = text.strip()
        if text == "doc":
            return cls("doc")
        m = _VERB_POINT.match(text)
        if m:
            return cls("verb", m.group(1), m.group(2).lower())
        bare = text[1:] if text.startswith("#") else text
        if bare in timex_ids:
            return cls("timex", bare)
        if text.startswith("#") or _ID_LIKE.match(text) or bare in verb_ids:
            return cls("timex", bare)
        return cls("named", text)

    def __str__(self) -> str:
        if self.kind == "doc":
            return "doc"
        if self.kind == "verb":
            return f"#{self.id}.{self.point}"
        return self.id


@dataclass(frozen=True)
class DocAnn:
    time: Optional[str] = None
    mod: Optional[str] = None


@dataclass(frozen=True)
class VerbAnn:
    id: str
    target: tuple[int, ...]
    view: Optional[View] = None
    tense: Optional[Tense] = None
    se: Optional[RelationSet] = None
    er: Optional[RelationSet] = None
    sr: Optional[RelationSet] = None
    s: Optional[PointRef] = None
    e: Optional[PointRef] = None
    r: Optional[PointRef] = None


@dataclass(frozen=True)
class TimeRefAnn:
    id: str
    target: tuple[int, ...]
    value: Optional[str] = None


@dataclass(frozen=True)
class LinkAnn:
    id: str
    kind: LinkKind
    source: Optional[str] = None
    targets: tuple[str, ...] = ()


_KIND_RANK = {"SD": 0, "S": 1, "E": 1, "R": 1, "T": 2, "N": 3}
_POINT_RANK = {"S": 0, "E": 1, "R": 2}


@dataclass(frozen=True)
class TimePointId:
    """A node of the constraint graph.

    kind is ``SD`` (discourse creation time), ``S``/``E``/``R`` of a verb,
    ``T`` of a time expression, or ``N`` for a named point.
    """

    kind: str
    ref: str = ""

    @classmethod
    def sd(cls) -> "TimePointId":
        return cls("SD")

    @classmethod
    def verb(cls, verb_id: str, point: str) -> "TimePointId":
        return cls(point.upper(), verb_id)

    @classmethod
    def timex(cls, timex_id: str) -> "TimePointId":
        return cls("T", timex_id)

    @classmethod
    def named(cls, label: str) -> "TimePointId":
        return cls("N", label)

    @classmethod
    def parse(cls, text: str) -> "TimePointId":
        """Read the label forms ``SD``, ``v1.e``, ``t1`` and ``@label``."""
        text = text.strip()
        if text.upper() == "SD":
            return cls.sd()
        if text.startswith("@") and len(text) > 1:
            return cls.named(text[1:])
        m = re.match(r"^#?([^.\s]+)\.([serSER])$", text)
        if m:
            return cls.verb(m.group(1), m.group(2))
        if text and not any(c.isspace() for c in text):
            return cls.timex(text.lstrip("#"))
        raise ValueError(f"not a time point: {text!r}")

    def sort_key(self) -> tuple:
        return (_KIND_RANK[self.kind], natural_key(self.ref), _POINT_RANK.get(self.kind, 0))

    def __lt__(self, other: "TimePointId") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.kind == "SD":
            return "SD"
        if self.kind == "T":
            return self.ref
        if self.kind == "N":
            return f"@{self.ref}"
        return f"{self.ref}.{self.kind}"


@dataclass(frozen=True)
class AnnotatedDocument:
    text: str = ""
    tokens: tuple[Token, ...] = ()
    doc: DocAnn = field(default_factory=DocAnn)
    verbs: tuple[VerbAnn, ...] = ()
    timerefxs: tuple[TimeRefAnn, ...] = ()
    links: tuple[LinkAnn, ...] = ()

    def verb(self, verb_id: str) -> Optional[VerbAnn]:
        return next((v for v in self.verbs if v.id == verb_id), None)

    def timerefx(self, timex_id: str) -> Optional[TimeRefAnn]:
        return next((t for t in self.timerefxs if t.id == timex_id), None)

    def target_text(self, target) -> str:
        return " ".join(self.tokens[i].text for i in target if i < len(self.tokens))
