"""Collision-free overlay geometry on a monospace grid.

Expression labels sit beneath their code line, left-aligned on the
expression and pushed rightward (one separator column apart) when they
would collide with an already-placed label. A leader line links a label
to its expression exactly when less than half of the label's width
overlaps the expression's columns. Block labels share one margin anchor
column: just right of the suggestion's widest line, capped at column 80.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .model import (
    BlockExplanation,
    ExpressionExplanation,
    ExplanationSet,
    Suggestion,
    SuggestionKind,
    suggestion_kind,
)

PALETTE_SIZE = 6
MARGIN_CAP_COL = 80


class StaleSet(ValueError):
    """Raised when a layout is requested with a set for another suggestion."""


class LabelKind(enum.Enum):
    EXPRESSION = "expression"
    BLOCK = "block"


@dataclass(frozen=True)
class GridMetrics:
    """Monospace grid parameters shared by the engine and its clients."""

    viewport_cols: int = 120
    label_max_width_cols: int = 40
    label_padding_cols: int = 1
    margin_gap_cols: int = 2

    def __post_init__(self) -> None:
        if self.viewport_cols < 40:
            raise ValueError(f"viewport_cols must be >= 40, got {self.viewport_cols}")
        if self.label_max_width_cols > self.viewport_cols:
            raise ValueError("label_max_width_cols must not exceed viewport_cols")
        if self.label_max_width_cols <= 2 * self.label_padding_cols:
            raise ValueError("label_max_width_cols leaves no room for text")


@dataclass(frozen=True)
class Leader:
    from_col: int  # expression midpoint on the code row
    to_col: int  # label's top-left column


@dataclass(frozen=True)
class LabelBox:
    id: str
    kind: LabelKind
    row: int
    col: int
    width_cols: int
    height_rows: int
    leader: Leader | None
    color_index: int


@dataclass(frozen=True)
class MarginBox:
    block_ref: int  # index into the ExplanationSet's blocks
    anchor_col: int
    row_start: int
    row_end: int
    fade: bool
    left_border: bool = True


@dataclass(frozen=True)
class LayoutPlan:
    """Grid geometry for every visible label, rows absolute in the document."""

    suggestion_id: str
    labels: tuple[LabelBox, ...] = ()
    margins: tuple[MarginBox, ...] = ()


def wrap_label_text(text: str, width: int) -> list[str]:
    """Greedy word wrap; words longer than the width are hard-broken."""
    rows: list[str] = []
    current = ""
    for word in text.split():
        if len(word) > width:
            if current:
                rows.append(current)
                current = ""
            while len(word) > width:
                rows.append(word[:width])
                word = word[width:]
        if not current:
            current = word
        elif len(current) + 1 + len(word) <= width:
            current += " " + word
        else:
            rows.append(current)
            current = word
    if current:
        rows.append(current)
    return rows or [""]


def measure_label(text: str, metrics: GridMetrics) -> tuple[int, int]:
    """(width_cols, height_rows) of a label, padding included.

    Text wraps at the maximum label width minus padding, so the padded
    box never exceeds label_max_width_cols.
    """
    wrap_width = metrics.label_max_width_cols - 2 * metrics.label_padding_cols
    rows = wrap_label_text(text, wrap_width)
    width = max(len(r) for r in rows) + 2 * metrics.label_padding_cols
    return width, len(rows)


def layout_expressions(
    line_len: int, items: list[ExpressionExplanation], metrics: GridMetrics
) -> list[LabelBox]:
    """Place one label per item below the code line (row 1 = directly below).

    Labels are processed left to right. Within a row tier each label
    starts at its expression's first column and is pushed right of the
    tier's occupied frontier plus one separator column when needed. A
    label that would still cut across a taller label from another tier
    drops to the tier below the deepest conflict. Rows returned here are
    relative to the code line; full_layout shifts them to document rows.
    """
    del line_len  # geometry never clips horizontally; kept for symmetry with blocks
    boxes: list[LabelBox] = []
    placed: list[tuple[int, int, int, int]] = []  # (row, col, width, height)
    tier_frontier: dict[int, int] = {}
    for item in items:
        width, height = measure_label(item.text, metrics)
        row = 1
        col = item.span.col_start
        while True:
            frontier = tier_frontier.get(row)
            if frontier is not None and col <= frontier:
                col = frontier + 1
            conflicts = [
                (prow, pcol, pw, ph)
                for (prow, pcol, pw, ph) in placed
                if prow != row
                and prow < row + height
                and row < prow + ph
                and pcol < col + width
                and col < pcol + pw
            ]
            if not conflicts:
                break
            row = max(prow + ph for (prow, pcol, pw, ph) in conflicts)
            col = item.span.col_start
        placed.append((row, col, width, height))
        tier_frontier[row] = max(tier_frontier.get(row, -1), col + width)
        overlap = max(
            0, min(col + width, item.span.col_end) - max(col, item.span.col_start)
        )
        leader = None
        if overlap / width < 0.5:
            midpoint = (item.span.col_start + item.span.col_end) // 2
            leader = Leader(from_col=midpoint, to_col=col)
        boxes.append(
            LabelBox(
                id=f"expr:{item.span.line}:{item.ordinal}",
                kind=LabelKind.EXPRESSION,
                row=row,
                col=col,
                width_cols=width,
                height_rows=height,
                leader=leader,
                color_index=item.ordinal % PALETTE_SIZE,
            )
        )
    return boxes


def layout_blocks(
    line_lengths: list[int], blocks: tuple[BlockExplanation, ...], metrics: GridMetrics
) -> list[MarginBox]:
    """One margin box per block, all sharing the anchor column.

    The anchor sits margin_gap_cols right of the widest line, capped at
    column 80. A box fades on its left edge when any covered line runs
    underneath the label region (only possible once the cap binds).
    """
    if not blocks:
        return []
    anchor = min(max(line_lengths), MARGIN_CAP_COL) + metrics.margin_gap_cols
    out = []
    for i, b in enumerate(blocks):
        covered = line_lengths[b.start_line : b.end_line + 1]
        fade = any(length > anchor - metrics.margin_gap_cols for length in covered)
        out.append(
            MarginBox(
                block_ref=i,
                anchor_col=anchor,
                row_start=b.start_line,
                row_end=b.end_line,
                fade=fade,
            )
        )
    return out


def _shift_label(box: LabelBox, row_offset: int) -> LabelBox:
    return LabelBox(
        id=box.id,
        kind=box.kind,
        row=box.row + row_offset,
        col=box.col,
        width_cols=box.width_cols,
        height_rows=box.height_rows,
        leader=box.leader,
        color_index=box.color_index,
    )


def full_layout(
    s: Suggestion,
    es: ExplanationSet,
    hover_line: int | None,
    metrics: GridMetrics,
) -> LayoutPlan:
    """The complete overlay plan for the suggestion's current state.

    Single-line suggestions always show their expression labels.
    Multi-line suggestions show margin boxes for every block, and
    expression labels only for the hovered line. Rows are absolute
    document rows.
    """
    if es.suggestion_id != s.suggestion_id:
        raise StaleSet(
            f"set {es.suggestion_id!r} does not belong to suggestion"
            f" {s.suggestion_id!r}"
        )
    labels: tuple[LabelBox, ...] = ()
    margins: tuple[MarginBox, ...] = ()
    if suggestion_kind(s) is SuggestionKind.SINGLE_LINE:
        items = list(es.expressions_by_line.get(0, ()))
        labels = tuple(
            _shift_label(b, s.anchor_line)
            for b in layout_expressions(len(s.lines[0]), items, metrics)
        )
    else:
        line_lengths = [len(ln) for ln in s.lines]
        margins = tuple(
            MarginBox(
                block_ref=m.block_ref,
                anchor_col=m.anchor_col,
                row_start=m.row_start + s.anchor_line,
                row_end=m.row_end + s.anchor_line,
                fade=m.fade,
                left_border=m.left_border,
            )
            for m in layout_blocks(line_lengths, es.blocks, metrics)
        )
        if hover_line is not None and 0 <= hover_line < len(s.lines):
            items = list(es.expressions_by_line.get(hover_line, ()))
            labels = tuple(
                _shift_label(b, s.anchor_line + hover_line)
                for b in layout_expressions(len(s.lines[hover_line]), items, metrics)
            )
    return LayoutPlan(suggestion_id=s.suggestion_id, labels=labels, margins=margins)
