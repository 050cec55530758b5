"""Path-consistency closure and queries over constraint graphs.

Path consistency decides consistency of point-algebra networks.  Its labels
are minimal unless some label is exactly ``{<, >}``; such results carry the
verdict "path-consistent" rather than "consistent".
:func:`oracle_minimal_labels` gives exact labels for small graphs by
enumerating weak orders.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .algebra import AFTER, BEFORE, EQUAL, FULL, RelationSet, compose, converse
from .graph import ConstraintGraph
from .model import TimePointId

__all__ = [
    "ClosureResult",
    "Conflict",
    "EventOrder",
    "AnchorFact",
    "close",
    "query_relation",
    "event_order",
    "anchor_report",
    "oracle_minimal_labels",
    "weak_orders",
    "ORACLE_MAX_NODES",
]

ORACLE_MAX_NODES = 8
NOT_EQUAL = RelationSet("<>")


@dataclass(frozen=True)
class Conflict:
    triangle: tuple[TimePointId, TimePointId, TimePointId]
    provenance: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"triangle": [str(p) for p in self.triangle], "provenance": list(self.provenance)}


@dataclass
class ClosureResult:
    graph: ConstraintGraph
    consistent: bool
    conflict: Optional[Conflict] = None

    @property
    def verdict(self) -> str:
        if not self.consistent:
            return "inconsistent"
        if any(r == NOT_EQUAL for r in self.graph.edges.values()):
            return "path-consistent"
        return "consistent"

    def to_dict(self) -> dict:
        out = self.graph.to_dict()
        out["consistent"] = self.consistent
        out["verdict"] = self.verdict
        out["conflict"] = self.conflict.to_dict() if self.conflict else None
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def close(g: ConstraintGraph) -> ClosureResult:
    """Refine every edge to a path-consistent fixpoint.

    Works on a copy.  The agenda is FIFO over changed edges; when a
    refinement empties an edge the triangle that caused it is reported.
    """
    work = g.copy()
    nodes = work.sorted_nodes()
    index = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    full = FULL.mask
    rel = [[full] * n for _ in range(n)]
    for i in range(n):
        rel[i][i] = EQUAL.mask
    prov: dict[tuple[int, int], list[str]] = {}
    for (a, b), r in work.edges.items():
        i, j = index[a], index[b]
        rel[i][j] = r.mask
        rel[j][i] = converse(r).mask
        prov[(i, j)] = list(work.provenance.get((a, b), []))

    def sources(i: int, j: int) -> list[str]:
        return prov.get((i, j) if i < j else (j, i), [])

    agenda = deque(sorted(prov))
    queued = set(agenda)
    conflict: Optional[Conflict] = None

    def refine(x: int, y: int, via: RelationSet, i: int, j: int, k: int) -> bool:
        nonlocal conflict
        old = rel[x][y]
        new = old & via.mask
        if new == old:
            return True
        key = (x, y) if x < y else (y, x)
        merged = list(dict.fromkeys(sources(x, y) + sources(i, j) + sources(j, k) + sources(i, k)))
        if new == 0:
            tri = tuple(nodes[t] for t in sorted({i, j, k}))
            conflict = Conflict(tri, tuple(merged))
            return False
        rel[x][y] = new
        rel[y][x] = converse(RelationSet(new)).mask
        prov[key] = merged
        if key not in queued:
            agenda.append(key)
            queued.add(key)
        return True

    while agenda and conflict is None:
        i, j = agenda.popleft()
        queued.discard((i, j))
        r_ij = RelationSet(rel[i][j])
        for k in range(n):
            if k == i or k == j:
                continue
            # i -> j -> k refines i -> k
            if not refine(i, k, compose(r_ij, RelationSet(rel[j][k])), i, j, k):
                break
            # k -> i -> j refines k -> j
            if not refine(k, j, compose(RelationSet(rel[k][i]), r_ij), k, i, j):
                break

    if conflict is not None:
        return ClosureResult(work, False, conflict)

    work.edges = {}
    work.provenance = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rel[i][j] != full:
                key = (nodes[i], nodes[j])
                work.edges[key] = RelationSet(rel[i][j])
                if prov.get((i, j)):
                    work.provenance[key] = prov[(i, j)]
    return ClosureResult(work, True, None)


def query_relation(res: ClosureResult, a: TimePointId, b: TimePointId) -> RelationSet:
    """Closed label of ``a`` relative to ``b``."""
    return res.graph.relation(a, b)


@dataclass
class EventOrder:
    classes: list[tuple[TimePointId, ...]]
    hasse: list[tuple[int, int]]
    incomparable: list[tuple[int, int, RelationSet]] = field(default_factory=list)

    def class_label(self, i: int) -> str:
        return "=".join(str(p) for p in self.classes[i])

    def to_dict(self) -> dict:
        return {
            "classes": [[str(p) for p in c] for c in self.classes],
            "hasse": [{"before": self.class_label(a), "after": self.class_label(b)} for a, b in self.hasse],
            "incomparable": [
                {"a": self.class_label(a), "b": self.class_label(b), "rel": str(r)}
                for a, b, r in self.incomparable
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = ["classes:"]
        lines += [f"  {self.class_label(i)}" for i in range(len(self.classes))]
        lines.append("order:")
        lines += [f"  {self.class_label(a)} < {self.class_label(b)}" for a, b in self.hasse]
        if self.incomparable:
            lines.append("unordered:")
            lines += [f"  {self.class_label(a)} {r} {self.class_label(b)}" for a, b, r in self.incomparable]
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        lines = ["digraph order {", "  rankdir=LR;"]
        for i in range(len(self.classes)):
            lines.append(f'  c{i} [label="{self.class_label(i)}"];')
        for a, b in self.hasse:
            lines.append(f"  c{a} -> c{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def event_order(res: ClosureResult, include_times: bool = False) -> EventOrder:
    """Group event points into ``=`` classes and order them by ``<``."""
    kinds = {"E", "T"} if include_times else {"E"}
    points = [p for p in res.graph.sorted_nodes() if p.kind in kinds]

    classes: list[list[TimePointId]] = []
    for p in points:
        for c in classes:
            if query_relation(res, p, c[0]) == EQUAL:
                c.append(p)
                break
        else:
            classes.append([p])

    m = len(classes)
    less = [[query_relation(res, classes[a][0], classes[b][0]) == BEFORE for b in range(m)] for a in range(m)]
    hasse = []
    incomparable = []
    for a in range(m):
        for b in range(m):
            if less[a][b] and not any(less[a][c] and less[c][b] for c in range(m)):
                hasse.append((a, b))
        for b in range(a + 1, m):
            if not less[a][b] and not less[b][a]:
                incomparable.append((a, b, query_relation(res, classes[a][0], classes[b][0])))
    return EventOrder([tuple(c) for c in classes], hasse, incomparable)


@dataclass(frozen=True)
class AnchorFact:
    point: TimePointId
    relation: str
    value: str
    anchor: TimePointId

    def to_dict(self) -> dict:
        return {"point": str(self.point), "relation": self.relation, "value": self.value, "anchor": str(self.anchor)}


def anchor_report(res: ClosureResult) -> list[AnchorFact]:
    """Position every point against each anchored point it is ordered with.

    Time expressions without a normalised value are reported by their
    surface text, in quotes.
    """
    g = res.graph
    anchors = dict(g.anchors)
    for p, text in g.surface.items():
        if p not in anchors and text:
            anchors[p] = f'"{text}"'
    facts = []
    for p in sorted(anchors):
        for q in g.sorted_nodes():
            if q == p:
                continue
            r = query_relation(res, q, p)
            if r == EQUAL:
                word = "="
            elif r == BEFORE:
                word = "before"
            elif r == AFTER:
                word = "after"
            else:
                continue
            facts.append(AnchorFact(q, word, anchors[p], p))
    return facts


@lru_cache(maxsize=None)
def weak_orders(n: int) -> np.ndarray:
    """Every ranking of n points with ties, as an array of shape (count, n).

    Row entries are ranks; equal ranks are simultaneous.  The row count is
    the n-th ordered Bell number.
    """
    # ordered set partitions, built by inserting each point into an existing
    # block or into a new block at any position
    layouts: list[list[list[int]]] = [[]]
    for p in range(n):
        nxt = []
        for blocks in layouts:
            for b in range(len(blocks)):
                nxt.append(blocks[:b] + [blocks[b] + [p]] + blocks[b + 1 :])
            for pos in range(len(blocks) + 1):
                nxt.append(blocks[:pos] + [[p]] + blocks[pos:])
        layouts = nxt
    ranks = np.zeros((len(layouts), n), dtype=np.int8)
    for row, blocks in enumerate(layouts):
        for rank, block in enumerate(blocks):
            ranks[row, block] = rank
    ranks.setflags(write=False)
    return ranks


def oracle_minimal_labels(
    g: ConstraintGraph,
) -> tuple[bool, dict[tuple[TimePointId, TimePointId], RelationSet]]:
    """Exact labels by brute force over all weak orders of the nodes.

    Returns ``(consistent, labels)``, with labels keyed like graph edges
    (lower point first) and covering every pair.  Limited to
    ``ORACLE_MAX_NODES`` nodes.
    """
    nodes = g.sorted_nodes()
    n = len(nodes)
    if n > ORACLE_MAX_NODES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_NODES} nodes, graph has {n}")
    index = {p: i for i, p in enumerate(nodes)}
    ranks = weak_orders(n).astype(np.int16)
    keep = np.ones(len(ranks), dtype=bool)
    for (a, b), r in g.edges.items():
        diff = np.sign(ranks[:, index[a]] - ranks[:, index[b]])
        allowed = np.zeros(len(ranks), dtype=bool)
        if r.mask & BEFORE.mask:
            allowed |= diff < 0
        if r.mask & EQUAL.mask:
            allowed |= diff == 0
        if r.mask & AFTER.mask:
            allowed |= diff > 0
        keep &= allowed
    models = ranks[keep]
    labels = {}
    for i in range(n):
        for j in range(i + 1, n):
            diff = np.sign(models[:, i] - models[:, j])
            mask = 0
            if (diff < 0).any():
                mask |= BEFORE.mask
            if (diff == 0).any():
                mask |= EQUAL.mask
            if (diff > 0).any():
                mask |= AFTER.mask
            labels[(nodes[i], nodes[j])] = RelationSet(mask)
    return bool(len(models)), labels
