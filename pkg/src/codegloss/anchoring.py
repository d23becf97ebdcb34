"""Mapping provider output onto exact source spans, plus validation.

The provider only proposes segment strings; this module owns the exact
bounds. Segments are anchored greedily left to right at their leftmost
occurrence, duplicates resolving in provider order. Segments that cannot
be anchored are dropped: a missing label is better than a mis-anchored
one.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace

from .model import (
    BlockExplanation,
    EmptyExplanation,
    ExpressionExplanation,
    Span,
    normalize_explanation_text,
)
from .splitting import (
    SegmentKind,
    is_identifier_char,
    split_top_level,
    structural_delimiters,
)

_VIOLATION = "violation: "


class Unparseable(ValueError):
    """Raised when no usable JSON array can be found in a provider payload."""


@dataclass(frozen=True)
class RawSegment:
    """One (segment text, explanation) pair as decoded from the provider."""

    segment_text: str
    explanation: str

    def __post_init__(self) -> None:
        if not self.segment_text.strip():
            raise ValueError("segment_text must be non-empty after trimming")


@dataclass(frozen=True)
class ValidationReport:
    """Machine-checkable slice of the explanation-correctness criteria.

    Content accuracy needs a human judge and is recorded as not
    evaluated. Flags are all true exactly when no note carries the
    ``violation:`` prefix.
    """

    complete: bool
    accurate_bounds: bool
    proper_segmentation: bool
    notes: tuple[str, ...]


def _decode_arrays(text: str):
    """Yield (array, start_index) for every JSON array decodable in text."""
    decoder = json.JSONDecoder()
    pos = text.find("[")
    while pos != -1:
        try:
            value, _ = decoder.raw_decode(text, pos)
        except ValueError:
            value = None
        if isinstance(value, list):
            yield value, pos
        pos = text.find("[", pos + 1)


def _is_plain_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def parse_expression_payload(text: str) -> list[RawSegment]:
    """Extract the first JSON array of {segment, explanation} objects.

    Tolerates surrounding prose and code fences. Entries with a blank
    segment or explanation are dropped; order is preserved.
    """
    for value, _ in _decode_arrays(text):
        shaped = [
            e
            for e in value
            if isinstance(e, dict)
            and isinstance(e.get("segment"), str)
            and isinstance(e.get("explanation"), str)
        ]
        if not shaped and value:
            continue
        return [
            RawSegment(e["segment"], e["explanation"])
            for e in shaped
            if e["segment"].strip() and e["explanation"].strip()
        ]
    raise Unparseable("no JSON array of {segment, explanation} objects found")


def parse_block_payload(text: str, line_count: int) -> list[BlockExplanation]:
    """Extract the first JSON array of {startLine, endLine, explanation} objects.

    Indices are clamped to [0, line_count - 1]; entries emptied by
    clamping, and entries whose explanation is blank, are dropped.
    Explanations come back normalized.
    """
    for value, _ in _decode_arrays(text):
        shaped = [e for e in value if block_entry_shaped(e)]
        if not shaped and value:
            continue
        return blocks_from_entries(shaped, line_count)
    raise Unparseable("no JSON array of {startLine, endLine, explanation} objects found")


def block_entry_shaped(e) -> bool:
    """True when a decoded JSON value looks like a block entry."""
    return (
        isinstance(e, dict)
        and _is_plain_int(e.get("startLine"))
        and _is_plain_int(e.get("endLine"))
        and isinstance(e.get("explanation"), str)
    )


def blocks_from_entries(entries: list[dict], line_count: int) -> list[BlockExplanation]:
    """Clamp and normalize shaped block entries, dropping unusable ones."""
    out: list[BlockExplanation] = []
    for e in entries:
        start = min(max(e["startLine"], 0), line_count - 1)
        end = min(max(e["endLine"], 0), line_count - 1)
        if start > end:
            continue
        try:
            text = normalize_explanation_text(e["explanation"])
        except EmptyExplanation:
            continue
        out.append(BlockExplanation(start, end, text))
    return out


def _find_occurrence(line: str, needle: str, start: int) -> tuple[int, int] | None:
    """Leftmost occurrence of needle at or after start, with fallbacks.

    Tries an exact match, then the whitespace-trimmed needle, then a
    match that ignores whitespace-run differences entirely.
    """
    i = line.find(needle, start)
    if i >= 0:
        return i, i + len(needle)
    trimmed = needle.strip()
    if trimmed != needle:
        i = line.find(trimmed, start)
        if i >= 0:
            return i, i + len(trimmed)
    pattern = r"\s*".join(re.escape(c) for c in trimmed if not c.isspace())
    m = re.compile(pattern).search(line, start)
    if m is not None and m.end() > m.start():
        return m.start(), m.end()
    return None


def anchor_segments(
    line: str, segs: list[RawSegment], *, line_index: int = 0
) -> list[ExpressionExplanation]:
    """Assign each segment its leftmost non-overlapping occurrence in line.

    Segments are consumed in provider order; each match must begin at or
    after the end of the previously anchored one. Unanchorable segments
    and segments whose explanation normalizes to nothing are dropped.
    Explanations come back normalized.
    """
    out: list[ExpressionExplanation] = []
    search = 0
    for seg in segs:
        found = _find_occurrence(line, seg.segment_text, search)
        if found is None:
            continue
        start, end = found
        try:
            text = normalize_explanation_text(seg.explanation)
        except EmptyExplanation:
            continue
        out.append(
            ExpressionExplanation(
                span=Span(line_index, start, end), text=text, ordinal=len(out)
            )
        )
        search = end
    return out


def _spans_overlap(a_start: int, a_end: int, b_start: int, b_end: int) -> bool:
    return a_start < b_end and b_start < a_end


def validate_expressions(
    line: str,
    items: list[ExpressionExplanation],
    expected_call_arity: int | None = None,
) -> ValidationReport:
    """Score anchored items against the mechanizable correctness criteria.

    ``complete``: when the line is a top-level call, the callee and each
    argument are covered by some item (for other lines the check is
    vacuous). ``accurate_bounds``: no span starts or ends inside an
    identifier or numeric literal. ``proper_segmentation``: spans are
    pairwise disjoint and cover no structural delimiter.
    """
    notes: list[str] = []
    units = split_top_level(line)
    callee = next((u for u in units if u.kind is SegmentKind.CALLEE), None)
    args = [u for u in units if u.kind is SegmentKind.ARG]

    complete = True
    if callee is not None:
        if expected_call_arity is not None and expected_call_arity != len(args):
            complete = False
            notes.append(
                f"{_VIOLATION}expected arity {expected_call_arity},"
                f" line has {len(args)} arguments"
            )
        for unit in [callee] + args:
            covered = any(
                _spans_overlap(
                    it.span.col_start, it.span.col_end, unit.col_start, unit.col_end
                )
                for it in items
            )
            if not covered:
                complete = False
                notes.append(f"{_VIOLATION}{unit.kind.value} {unit.text!r} not described")
    elif expected_call_arity is not None:
        complete = False
        notes.append(f"{_VIOLATION}expected a call, line has none at top level")

    accurate = True
    for it in items:
        s, e = it.span.col_start, it.span.col_end
        if s > 0 and is_identifier_char(line[s - 1]) and is_identifier_char(line[s]):
            accurate = False
            notes.append(f"{_VIOLATION}span [{s}, {e}) begins inside a token")
        if e < len(line) and is_identifier_char(line[e - 1]) and is_identifier_char(line[e]):
            accurate = False
            notes.append(f"{_VIOLATION}span [{s}, {e}) ends inside a token")

    proper = True
    for i, it in enumerate(items):
        for other in items[i + 1 :]:
            if _spans_overlap(
                it.span.col_start, it.span.col_end,
                other.span.col_start, other.span.col_end,
            ):
                proper = False
                notes.append(
                    f"{_VIOLATION}spans [{it.span.col_start}, {it.span.col_end}) and"
                    f" [{other.span.col_start}, {other.span.col_end}) overlap"
                )
    for col in structural_delimiters(line):
        for it in items:
            if it.span.col_start <= col < it.span.col_end:
                proper = False
                notes.append(
                    f"{_VIOLATION}span [{it.span.col_start}, {it.span.col_end})"
                    f" covers the delimiter at column {col}"
                )
    notes.append("info: content accuracy not machine-evaluated")
    return ValidationReport(complete, accurate, proper, tuple(notes))


def repair_blocks(
    blocks: list[BlockExplanation], line_count: int
) -> list[BlockExplanation]:
    """Sort blocks and make them disjoint and in-range.

    Overlaps resolve by pushing the later block's start past the earlier
    block's end; blocks emptied by that (or by clamping) are dropped.
    """
    clamped: list[BlockExplanation] = []
    for b in blocks:
        start = min(max(b.start_line, 0), line_count - 1)
        end = min(max(b.end_line, 0), line_count - 1)
        if start <= end:
            clamped.append(replace(b, start_line=start, end_line=end))
    out: list[BlockExplanation] = []
    for b in sorted(clamped, key=lambda b: b.start_line):
        if out and b.start_line <= out[-1].end_line:
            new_start = out[-1].end_line + 1
            if new_start > b.end_line:
                continue
            b = replace(b, start_line=new_start)
        out.append(b)
    return out
