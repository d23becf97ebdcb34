"""Depth-aware splitting of a single code line into top-level units.

This is the shared mini-lexer behind the mock provider's segmentation and
the validator's notion of call structure. It respects (), [] and {}
nesting plus single- and double-quoted strings with backslash escapes,
and it never parses any particular language: identifiers are just runs
of letters, digits, underscores and dots.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

_OPENERS = {"(": ")", "[": "]", "{": "}"}
_CLOSERS = {")", "]", "}"}
_IDENT_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_."
)
# Characters that, immediately before '=', make it part of another operator.
_EQ_PREFIX = frozenset("=!<>+-*/%&|^:@~")


class SegmentKind(enum.Enum):
    CALLEE = "callee"
    ARG = "arg"
    LHS = "lhs"
    RHS = "rhs"
    WHOLE = "whole"


@dataclass(frozen=True)
class Segment:
    text: str
    col_start: int
    col_end: int
    kind: SegmentKind


@dataclass(frozen=True)
class _Scan:
    """Per-character bracket depth and string membership for one line."""

    depths: tuple[int, ...]
    in_string: tuple[bool, ...]
    balanced: bool


def _scan(line: str) -> _Scan:
    depths = [0] * len(line)
    in_string = [False] * len(line)
    stack: list[str] = []
    quote: str | None = None
    escaped = False
    balanced = True
    for i, ch in enumerate(line):
        if quote is not None:
            in_string[i] = True
            depths[i] = len(stack)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == quote:
                quote = None
            continue
        if ch in ("'", '"'):
            quote = ch
            in_string[i] = True
            depths[i] = len(stack)
        elif ch in _OPENERS:
            depths[i] = len(stack)
            stack.append(_OPENERS[ch])
        elif ch in _CLOSERS:
            if not stack or stack[-1] != ch:
                balanced = False
                break
            stack.pop()
            depths[i] = len(stack)
        else:
            depths[i] = len(stack)
    if quote is not None or stack:
        balanced = False
    return _Scan(tuple(depths), tuple(in_string), balanced)


def _trimmed_span(line: str, start: int, end: int) -> tuple[int, int] | None:
    """Shrink [start, end) to its non-whitespace extent; None when empty."""
    while start < end and line[start].isspace():
        start += 1
    while end > start and line[end - 1].isspace():
        end -= 1
    if start >= end:
        return None
    return start, end


def _whole(line: str) -> list[Segment]:
    span = _trimmed_span(line, 0, len(line))
    if span is None:
        return []
    a, b = span
    return [Segment(line[a:b], a, b, SegmentKind.WHOLE)]


def _find_call(line: str, scan: _Scan) -> tuple[int, int, int] | None:
    """First top-level call: (callee_start, open_paren, close_paren)."""
    for i, ch in enumerate(line):
        if (
            ch == "("
            and scan.depths[i] == 0
            and not scan.in_string[i]
            and i > 0
            and line[i - 1] in _IDENT_CHARS
        ):
            start = i
            while start > 0 and line[start - 1] in _IDENT_CHARS:
                start -= 1
            for j in range(i + 1, len(line)):
                if line[j] == ")" and scan.depths[j] == 0 and not scan.in_string[j]:
                    return start, i, j
            return None
    return None


def _find_assignment(line: str, scan: _Scan) -> int | None:
    """Column of the first top-level bare '=' (not ==, <=, +=, :=, ...)."""
    for i, ch in enumerate(line):
        if ch != "=" or scan.depths[i] != 0 or scan.in_string[i]:
            continue
        if i > 0 and line[i - 1] in _EQ_PREFIX:
            continue
        if i + 1 < len(line) and line[i + 1] == "=":
            continue
        return i
    return None


def split_top_level(line: str) -> list[Segment]:
    """Split one line into its top-level units with exact columns.

    Rule order: a top-level call yields the dotted callee plus each
    top-level comma-separated argument; otherwise a top-level ``=``
    yields left and right sides; otherwise the whole trimmed line is one
    unit. Unbalanced delimiters never raise: the whole trimmed line is
    returned instead. A blank line yields no segments.
    """
    scan = _scan(line)
    if not scan.balanced:
        return _whole(line)
    call = _find_call(line, scan)
    if call is not None:
        callee_start, open_paren, close_paren = call
        segs = [
            Segment(
                line[callee_start:open_paren],
                callee_start,
                open_paren,
                SegmentKind.CALLEE,
            )
        ]
        arg_start = open_paren + 1
        cut_points = [
            k
            for k in range(open_paren + 1, close_paren)
            if line[k] == ","
            and scan.depths[k] == 1
            and not scan.in_string[k]
        ]
        for cut in cut_points + [close_paren]:
            span = _trimmed_span(line, arg_start, cut)
            if span is not None:
                a, b = span
                segs.append(Segment(line[a:b], a, b, SegmentKind.ARG))
            arg_start = cut + 1
        return segs
    eq = _find_assignment(line, scan)
    if eq is not None:
        segs = []
        lhs = _trimmed_span(line, 0, eq)
        rhs = _trimmed_span(line, eq + 1, len(line))
        if lhs is not None:
            segs.append(Segment(line[lhs[0] : lhs[1]], lhs[0], lhs[1], SegmentKind.LHS))
        if rhs is not None:
            segs.append(Segment(line[rhs[0] : rhs[1]], rhs[0], rhs[1], SegmentKind.RHS))
        if segs:
            return segs
    return _whole(line)


def structural_delimiters(line: str) -> tuple[int, ...]:
    """Columns of the delimiters between top-level units.

    For a call these are the outer parentheses and the top-level commas;
    for an assignment, the ``=``. Expression spans must not cover them.
    """
    scan = _scan(line)
    if not scan.balanced:
        return ()
    call = _find_call(line, scan)
    if call is not None:
        _, open_paren, close_paren = call
        commas = tuple(
            k
            for k in range(open_paren + 1, close_paren)
            if line[k] == "," and scan.depths[k] == 1 and not scan.in_string[k]
        )
        return (open_paren,) + commas + (close_paren,)
    eq = _find_assignment(line, scan)
    if eq is not None:
        return (eq,)
    return ()


def is_identifier_char(ch: str) -> bool:
    return ch in _IDENT_CHARS
