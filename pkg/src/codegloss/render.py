"""Batch output: the JSON document and the annotated-text view.

Annotated text paints the same geometry the interactive clients get:
block explanations in a right margin that starts at the engine's anchor
column, expression labels on rows inserted beneath their code line,
leader dots linking a label to its expression when the layout says so.
"""

from __future__ import annotations

from .layout import (
    GridMetrics,
    LabelBox,
    full_layout,
    layout_blocks,
    layout_expressions,
    wrap_label_text,
)
from .model import (
    ExplanationSet,
    Suggestion,
    SuggestionKind,
    suggestion_kind,
)
from .pipeline import GRANULARITY_BLOCKS, GRANULARITY_BOTH, GRANULARITY_EXPRESSIONS
from .protocol import expression_payload, plan_payload


def explanation_document(
    s: Suggestion, es: ExplanationSet, metrics: GridMetrics
) -> dict:
    """The machine-readable result: lines, explanations, hoverless layout."""
    plan = full_layout(s, es, None, metrics)
    return {
        "lines": list(s.lines),
        "expressionsByLine": {
            str(line): [expression_payload(i) for i in items]
            for line, items in sorted(es.expressions_by_line.items())
        },
        "blocks": [
            {"startLine": b.start_line, "endLine": b.end_line, "text": b.text}
            for b in es.blocks
        ],
        "layout": plan_payload(plan),
    }


def box_overflows(box: LabelBox, metrics: GridMetrics) -> bool:
    return box.col + box.width_cols > metrics.viewport_cols


class _CharGrid:
    """A growable grid of character cells with an occupancy mask."""

    def __init__(self) -> None:
        self._rows: list[list[str]] = []
        self._taken: list[list[bool]] = []

    def paint(self, row: int, col: int, text: str, spare_taken: bool = False) -> None:
        while len(self._rows) <= row:
            self._rows.append([])
            self._taken.append([])
        cells, taken = self._rows[row], self._taken[row]
        while len(cells) < col + len(text):
            cells.append(" ")
            taken.append(False)
        for i, ch in enumerate(text):
            if spare_taken and taken[col + i]:
                continue
            cells[col + i] = ch
            taken[col + i] = True

    def lines(self) -> list[str]:
        return ["".join(cells).rstrip() for cells in self._rows]


def _label_rows(items, line_len: int, metrics: GridMetrics) -> list[str]:
    boxes = layout_expressions(line_len, list(items), metrics)
    if not boxes:
        return []
    grid = _CharGrid()
    pad = " " * metrics.label_padding_cols
    wrap_width = metrics.label_max_width_cols - 2 * metrics.label_padding_cols
    for item, box in zip(items, boxes):
        for r, text_row in enumerate(wrap_label_text(item.text, wrap_width)):
            grid.paint(box.row - 1 + r, box.col, f"{pad}{text_row}{pad}")
    for box in boxes:
        if box.leader is not None:
            a, b = sorted((box.leader.from_col, box.leader.to_col))
            grid.paint(box.row - 1, a, "." * (b - a + 1), spare_taken=True)
    return grid.lines()


def annotated_text(
    s: Suggestion,
    es: ExplanationSet,
    metrics: GridMetrics,
    granularity: str = GRANULARITY_BOTH,
) -> str:
    """Code with explanations laid into it, one string, trailing newline."""
    want_expr = granularity in (GRANULARITY_EXPRESSIONS, GRANULARITY_BOTH)
    want_blocks = granularity in (GRANULARITY_BLOCKS, GRANULARITY_BOTH)
    multi = suggestion_kind(s) is SuggestionKind.MULTI_LINE

    margin_cells: dict[int, str] = {}
    anchor_col = 0
    if want_blocks and multi and es.blocks:
        line_lengths = [len(ln) for ln in s.lines]
        boxes = layout_blocks(line_lengths, es.blocks, metrics)
        anchor_col = boxes[0].anchor_col  # shared by every margin box
        for box in boxes:
            border = "~" if box.fade else "|"
            text_width = max(metrics.viewport_cols - box.anchor_col - 2, 8)
            rows = wrap_label_text(es.blocks[box.block_ref].text, text_width)
            for offset, code_row in enumerate(range(box.row_start, box.row_end + 1)):
                text = rows[offset] if offset < len(rows) else ""
                margin_cells[code_row] = f"{border} {text}".rstrip()

    out: list[str] = []
    for i, line in enumerate(s.lines):
        if i in margin_cells:
            out.append(line.ljust(anchor_col) + margin_cells[i])
        else:
            out.append(line.rstrip())
        if want_expr:
            items = es.expressions_by_line.get(i, ())
            out.extend(_label_rows(items, len(line), metrics))
    return "\n".join(out) + "\n"
