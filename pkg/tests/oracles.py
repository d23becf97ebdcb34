"""Independent reference implementations used to cross-check the engine.

Everything here is deliberately written with different machinery than
the code under test (regex vs hand scanning, exhaustive enumeration vs
str.find, pairwise rectangle checks vs frontier bookkeeping) so the two
sides cannot share a bug.
"""

from __future__ import annotations

import re

_TERMINATOR = re.compile(r"[.!?](?= |$)")


def reference_normalize(raw: str) -> str:
    """Regex-based reference for whitespace collapse + two-sentence cut."""
    collapsed = re.sub(r"\s+", " ", raw).strip()
    matches = list(_TERMINATOR.finditer(collapsed))
    if len(matches) >= 2:
        collapsed = collapsed[: matches[1].end()]
    return collapsed


def _exact_positions(line: str, needle: str, start: int) -> list[tuple[int, int]]:
    return [
        (i, i + len(needle))
        for i in range(start, len(line) - len(needle) + 1)
        if line[i : i + len(needle)] == needle
    ]


def _whitespace_blind_match(line: str, chars: list[str], i: int) -> int | None:
    """Match needle chars from position i, skipping line whitespace between them."""
    if i >= len(line) or line[i] != chars[0]:
        return None
    j = i + 1
    for ch in chars[1:]:
        while j < len(line) and line[j].isspace():
            j += 1
        if j >= len(line) or line[j] != ch:
            return None
        j += 1
    return j


def reference_anchor(line: str, segment_texts: list[str]) -> list[tuple[int, int]]:
    """Brute-force leftmost non-overlapping assignment.

    For each segment in order, every start position at or after the end
    of the previously anchored segment is enumerated and the smallest
    wins, trying the matching tiers in contract order: exact, then the
    trimmed text, then a whitespace-blind comparison. Segments with no
    match anywhere are skipped.
    """
    spans: list[tuple[int, int]] = []
    prev_end = 0
    for seg in segment_texts:
        found = _exact_positions(line, seg, prev_end)
        trimmed = seg.strip()
        if not found and trimmed != seg:
            found = _exact_positions(line, trimmed, prev_end)
        if not found:
            chars = [c for c in trimmed if not c.isspace()]
            for i in range(prev_end, len(line)):
                end = _whitespace_blind_match(line, chars, i)
                if end is not None:
                    found = [(i, end)]
                    break
        if not found:
            continue
        start, end = min(found)
        spans.append((start, end))
        prev_end = end
    return spans


def boxes_intersect(a, b) -> bool:
    """Closed-open rectangle intersection on (row, col, height, width)."""
    return (
        a.row < b.row + b.height_rows
        and b.row < a.row + a.height_rows
        and a.col < b.col + b.width_cols
        and b.col < a.col + a.width_cols
    )


def any_overlap(boxes) -> bool:
    for i, a in enumerate(boxes):
        for b in boxes[i + 1 :]:
            if boxes_intersect(a, b):
                return True
    return False


def check_expression_placement(items, boxes) -> list[str]:
    """Independent audit of one layout_expressions result.

    Checks: no pair of boxes overlaps; every displaced label is only as
    far right as collisions force it (one column left would collide with
    some box, separator included); the leader is present exactly when
    under half of the label overlaps its expression's columns.
    """
    problems: list[str] = []
    if any_overlap(boxes):
        problems.append("boxes overlap")
    for item, box in zip(items, boxes):
        if box.col < item.span.col_start:
            problems.append(f"{box.id} placed left of its expression")
        elif box.col > item.span.col_start:
            shifted_col = box.col - 1
            would_collide = any(
                other is not box
                and other.row < box.row + box.height_rows
                and box.row < other.row + other.height_rows
                and shifted_col < other.col + other.width_cols + 1
                and other.col < shifted_col + box.width_cols
                for other in boxes
            )
            if not would_collide:
                problems.append(f"{box.id} displaced further than collisions force")
        lo = max(box.col, item.span.col_start)
        hi = min(box.col + box.width_cols, item.span.col_end)
        ratio = max(0, hi - lo) / box.width_cols
        if (box.leader is not None) != (ratio < 0.5):
            problems.append(
                f"{box.id} leader biconditional broken: ratio={ratio}, "
                f"leader={'present' if box.leader else 'absent'}"
            )
    return problems
