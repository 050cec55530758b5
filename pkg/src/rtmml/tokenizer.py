"""Token segmentation and ``#token``/``#range`` target references.

No segmentation scheme ships with RTMML documents, so this splitter is
inferred from the offsets used in published RTMML markup: whitespace chunks,
with punctuation peeled off either end as single-character tokens.
Punctuation inside a chunk (``5,745,188``, ``C$44.3``, ``cease-fire``) stays
attached.
"""

from __future__ import annotations

import re

from .model import Token

__all__ = ["tokenize", "resolve_target", "format_target", "TargetError", "EDGE_PUNCT"]

EDGE_PUNCT = frozenset(",.;:!?\"'()[]`“”‘’")

_CHUNK = re.compile(r"\S+")
_TERM = re.compile(r"#token(\d+)$")
_RANGE = re.compile(r"#range\(\s*#token(\d+)\s*,\s*#token(\d+)\s*\)$")


class TargetError(ValueError):
    pass


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []

    def emit(start: int, end: int) -> None:
        tokens.append(Token(len(tokens), text[start:end], start, end))

    for m in _CHUNK.finditer(text):
        start, end = m.span()
        trailing = []
        while start < end and text[start] in EDGE_PUNCT:
            emit(start, start + 1)
            start += 1
        while end > start and text[end - 1] in EDGE_PUNCT:
            end -= 1
            trailing.append(end)
        if start < end:
            emit(start, end)
        for pos in reversed(trailing):
            emit(pos, pos + 1)
    return tokens


def _split_terms(spec: str) -> list[str]:
    # commas inside #range(...) are not term separators
    terms, depth, buf = [], 0, []
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            terms.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    terms.append("".join(buf))
    return [t.strip() for t in terms]


def resolve_target(spec: str, token_count: int | None = None, strict: bool = False) -> tuple[int, ...]:
    """Expand a target attribute into sorted token indices.

    ``token_count=None`` skips the bounds check.  In strict mode terms must
    already be in increasing order without overlap.
    """
    indices: list[int] = []
    for term in _split_terms(spec):
        if not term:
            raise TargetError(f"empty term in target {spec!r}")
        m = _TERM.match(term)
        if m:
            indices.append(int(m.group(1)))
            continue
        m = _RANGE.match(term)
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            if a > b:
                raise TargetError(f"reversed range #token{a}..#token{b} in {spec!r}")
            indices.extend(range(a, b + 1))
            continue
        raise TargetError(f"malformed target term {term!r}")
    if strict and any(x >= y for x, y in zip(indices, indices[1:])):
        raise TargetError(f"target terms out of order: {spec!r}")
    out = tuple(sorted(set(indices)))
    if token_count is not None and out and out[-1] >= token_count:
        raise TargetError(f"token index {out[-1]} out of range (document has {token_count} tokens)")
    return out


def format_target(indices) -> str:
    """Inverse of :func:`resolve_target`; contiguous runs become ranges."""
    indices = sorted(set(indices))
    if not indices:
        raise TargetError("empty target")
    runs, start, prev = [], indices[0], indices[0]
    for i in indices[1:]:
        if i == prev + 1:
            prev = i
            continue
        runs.append((start, prev))
        start = prev = i
    runs.append((start, prev))
    return ",".join(
        f"#token{a}" if a == b else f"#range(#token{a},#token{b})" for a, b in runs
    )
