"""Qualitative point algebra over the basic relations ``<``, ``=`` and ``>``.

A :class:`RelationSet` is a disjunction of basic relations stored as a 3-bit
mask.  Composition, converse and intersection are table driven.  The module
also holds the mapping between Reichenbach's (view, tense) pairs and the
relations they impose on speech (S), event (E) and reference (R) time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

__all__ = [
    "RelationSet",
    "BEFORE",
    "EQUAL",
    "AFTER",
    "FULL",
    "EMPTY",
    "View",
    "Tense",
    "TenseProfile",
    "TABLE1",
    "compose",
    "intersect",
    "converse",
    "tense_to_relations",
    "classify_tense",
    "sr_for_tense",
    "er_for_view",
]

_LT, _EQ, _GT = 1, 2, 4
_SYMBOLS = ((_LT, "<"), (_EQ, "="), (_GT, ">"))


class RelationSet:
    """Immutable subset of ``{<, =, >}``.

    ``RelationSet("<=")`` reads a relation string; characters may appear in
    any order and repeat.  ``str()`` gives the canonical ``<``, ``=``, ``>``
    ordering.
    """

    __slots__ = ("_mask",)

    def __init__(self, value: "str | int | RelationSet" = 0) -> None:
        if isinstance(value, RelationSet):
            mask = value._mask
        elif isinstance(value, int):
            if not 0 <= value <= 7:
                raise ValueError(f"relation mask out of range: {value}")
            mask = value
        elif isinstance(value, str):
            mask = 0
            for ch in value:
                if ch == "<":
                    mask |= _LT
                elif ch == "=":
                    mask |= _EQ
                elif ch == ">":
                    mask |= _GT
                elif not ch.isspace():
                    raise ValueError(f"invalid relation character {ch!r} in {value!r}")
        else:
            raise TypeError(f"cannot build RelationSet from {type(value).__name__}")
        object.__setattr__(self, "_mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("RelationSet is immutable")

    @classmethod
    def parse(cls, text: str) -> "RelationSet":
        """Parse an attribute value; the empty string is rejected."""
        rel = cls(text)
        if not rel:
            raise ValueError(f"empty relation set: {text!r}")
        return rel

    @property
    def mask(self) -> int:
        return self._mask

    def __bool__(self) -> bool:
        return self._mask != 0

    def __len__(self) -> int:
        return bin(self._mask).count("1")

    def __iter__(self) -> Iterator["RelationSet"]:
        for bit, _ in _SYMBOLS:
            if self._mask & bit:
                yield _BASIC[bit]

    def __contains__(self, item: "RelationSet | str") -> bool:
        other = RelationSet(item)
        return bool(other) and (other._mask & self._mask) == other._mask

    def __and__(self, other: "RelationSet") -> "RelationSet":
        return RelationSet(self._mask & other._mask)

    def __or__(self, other: "RelationSet") -> "RelationSet":
        return RelationSet(self._mask | other._mask)

    def __le__(self, other: "RelationSet") -> bool:
        return (self._mask & ~other._mask) == 0

    def __lt__(self, other: "RelationSet") -> bool:
        return self <= other and self._mask != other._mask

    def __ge__(self, other: "RelationSet") -> bool:
        return other <= self

    def __gt__(self, other: "RelationSet") -> bool:
        return other < self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RelationSet):
            return self._mask == other._mask
        if isinstance(other, str):
            try:
                return self._mask == RelationSet(other)._mask
            except ValueError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("RelationSet", self._mask))

    def __str__(self) -> str:
        return "".join(sym for bit, sym in _SYMBOLS if self._mask & bit)

    def __repr__(self) -> str:
        return f"RelationSet({str(self)!r})"

    def is_full(self) -> bool:
        return self._mask == 7

    def is_singleton(self) -> bool:
        return self._mask in (_LT, _EQ, _GT)


_BASIC = {bit: RelationSet(bit) for bit, _ in _SYMBOLS}

BEFORE = RelationSet("<")
EQUAL = RelationSet("=")
AFTER = RelationSet(">")
FULL = RelationSet("<=>")
EMPTY = RelationSet()

# composition of basic relations: a r1 b, b r2 c  =>  a ? c
_BASE_COMPOSE = {
    (_LT, _LT): _LT,
    (_LT, _EQ): _LT,
    (_LT, _GT): 7,
    (_EQ, _LT): _LT,
    (_EQ, _EQ): _EQ,
    (_EQ, _GT): _GT,
    (_GT, _LT): 7,
    (_GT, _EQ): _GT,
    (_GT, _GT): _GT,
}


def _build_compose_table() -> list[list[int]]:
    table = [[0] * 8 for _ in range(8)]
    for m1 in range(8):
        for m2 in range(8):
            out = 0
            for b1, _ in _SYMBOLS:
                if not m1 & b1:
                    continue
                for b2, _ in _SYMBOLS:
                    if m2 & b2:
                        out |= _BASE_COMPOSE[(b1, b2)]
            table[m1][m2] = out
    return table


_COMPOSE = _build_compose_table()
_CONVERSE = [((m & _LT) << 2) | (m & _EQ) | ((m & _GT) >> 2) for m in range(8)]


def compose(r1: RelationSet, r2: RelationSet) -> RelationSet:
    """Relation of a to c given ``a r1 b`` and ``b r2 c``."""
    return RelationSet(_COMPOSE[r1.mask][r2.mask])


def intersect(r1: RelationSet, r2: RelationSet) -> RelationSet:
    """Conjunction of two constraints; an empty result means inconsistency."""
    return RelationSet(r1.mask & r2.mask)


def converse(r: RelationSet) -> RelationSet:
    return RelationSet(_CONVERSE[r.mask])


class View(str, enum.Enum):
    SIMPLE = "simple"
    ANTERIOR = "anterior"
    POSTERIOR = "posterior"


class Tense(str, enum.Enum):
    PAST = "past"
    PRESENT = "present"
    FUTURE = "future"


# relation of S to R, fixed by tense
_SR_BY_TENSE = {Tense.PAST: AFTER, Tense.PRESENT: EQUAL, Tense.FUTURE: BEFORE}
# relation of E to R, fixed by view
_ER_BY_VIEW = {View.ANTERIOR: BEFORE, View.SIMPLE: EQUAL, View.POSTERIOR: AFTER}

_NAMES = {
    (View.ANTERIOR, Tense.PAST): ("Anterior past", "Past perfect"),
    (View.SIMPLE, Tense.PAST): ("Simple past", "Simple past"),
    (View.POSTERIOR, Tense.PAST): ("Posterior past", None),
    (View.ANTERIOR, Tense.PRESENT): ("Anterior present", "Present perfect"),
    (View.SIMPLE, Tense.PRESENT): ("Simple present", "Simple present"),
    (View.POSTERIOR, Tense.PRESENT): ("Posterior present", "Simple future"),
    (View.ANTERIOR, Tense.FUTURE): ("Anterior future", "Future perfect"),
    (View.SIMPLE, Tense.FUTURE): ("Simple future", "Simple future"),
    (View.POSTERIOR, Tense.FUTURE): ("Posterior future", None),
}


@dataclass(frozen=True)
class TenseProfile:
    view: View
    tense: Tense
    sr: RelationSet
    er: RelationSet
    reichenbach_name: Optional[str] = None
    english_name: Optional[str] = None


class TenseRelations(NamedTuple):
    sr: RelationSet
    er: RelationSet
    se: RelationSet


def sr_for_tense(tense: Tense) -> RelationSet:
    return _SR_BY_TENSE[Tense(tense)]


def er_for_view(view: View) -> RelationSet:
    return _ER_BY_VIEW[View(view)]


def tense_to_relations(view: View, tense: Tense) -> TenseRelations:
    """Canonical S/E/R relations for a (view, tense) pair.

    ``se`` is obtained by chaining S-to-R with R-to-E and may be disjunctive
    (posterior past and anterior future each admit several arrangements).
    """
    sr = sr_for_tense(tense)
    er = er_for_view(view)
    return TenseRelations(sr=sr, er=er, se=compose(sr, converse(er)))


def classify_tense(sr: RelationSet, er: RelationSet) -> Optional[TenseProfile]:
    """Inverse of :func:`tense_to_relations`; ``None`` unless both are singletons."""
    if not (sr.is_singleton() and er.is_singleton()):
        return None
    tense = next(t for t, r in _SR_BY_TENSE.items() if r == sr)
    view = next(v for v, r in _ER_BY_VIEW.items() if r == er)
    reich, english = _NAMES[(view, tense)]
    return TenseProfile(view, tense, sr, er, reich, english)


class Table1Row(NamedTuple):
    arrangement: str
    view: View
    tense: Tense
    reichenbach_name: Optional[str]
    english_name: Optional[str]


# The 13 S/E/R arrangements of Reichenbach's tense table.  Unnamed rows are
# attached to the (view, tense) pair whose sr/er they realise.
TABLE1 = (
    Table1Row("E<R<S", View.ANTERIOR, Tense.PAST, "Anterior past", "Past perfect"),
    Table1Row("E=R<S", View.SIMPLE, Tense.PAST, "Simple past", "Simple past"),
    Table1Row("R<E<S", View.POSTERIOR, Tense.PAST, "Posterior past", None),
    Table1Row("R<S=E", View.POSTERIOR, Tense.PAST, None, None),
    Table1Row("R<S<E", View.POSTERIOR, Tense.PAST, None, None),
    Table1Row("E<S=R", View.ANTERIOR, Tense.PRESENT, "Anterior present", "Present perfect"),
    Table1Row("S=R=E", View.SIMPLE, Tense.PRESENT, "Simple present", "Simple present"),
    Table1Row("S=R<E", View.POSTERIOR, Tense.PRESENT, "Posterior present", "Simple future"),
    Table1Row("S<E<R", View.ANTERIOR, Tense.FUTURE, "Anterior future", "Future perfect"),
    Table1Row("S=E<R", View.ANTERIOR, Tense.FUTURE, None, None),
    Table1Row("E<S<R", View.ANTERIOR, Tense.FUTURE, None, None),
    Table1Row("S<R=E", View.SIMPLE, Tense.FUTURE, "Simple future", "Simple future"),
    Table1Row("S<R<E", View.POSTERIOR, Tense.FUTURE, "Posterior future", None),
)


def arrangement_relations(arrangement: str) -> dict[tuple[str, str], RelationSet]:
    """Read a chain such as ``"E<R<S"`` into the relation of every ordered pair.

    Returns a mapping ``(x, y) -> RelationSet`` for x, y in ``{"S", "E", "R"}``.
    """
    rank: dict[str, int] = {}
    level = 0
    for i, ch in enumerate(arrangement):
        if ch in "SER":
            if ch in rank:
                raise ValueError(f"point {ch} repeated in {arrangement!r}")
            rank[ch] = level
        elif ch == "<":
            level += 1
        elif ch != "=":
            raise ValueError(f"bad arrangement {arrangement!r}")
    if set(rank) != {"S", "E", "R"}:
        raise ValueError(f"arrangement must mention S, E and R: {arrangement!r}")
    out = {}
    for x in "SER":
        for y in "SER":
            if x == y:
                continue
            d = rank[x] - rank[y]
            out[(x, y)] = BEFORE if d < 0 else AFTER if d > 0 else EQUAL
    return out
