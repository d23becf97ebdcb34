"""Newline-delimited JSON wire protocol.

Each frame is one JSON object per line carrying a "type" field plus a
payload. Encoding is canonical (sorted keys, compact separators, ASCII)
so identical messages are identical bytes. Unknown extra fields survive
a decode/encode round trip untouched; field names on the wire are
camelCase. The full field-by-field reference lives in docs/protocol.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .layout import LabelBox, LayoutPlan, MarginBox
from .model import (
    BlockExplanation,
    ExpressionExplanation,
    Suggestion,
    make_suggestion,
)

CLIENT_TYPES = frozenset(
    {
        "hello",
        "configure",
        "suggestion_shown",
        "suggestion_accepted",
        "suggestion_dismissed",
        "hover",
        "unhover",
        "explain_file",
        "cancel_file",
    }
)
SERVER_TYPES = frozenset({"ready", "expressions", "block", "layout", "status", "error"})

PROTOCOL_VERSION = 1


class MalformedFrame(ValueError):
    """Raised when a frame is not one JSON object with a string "type"."""


class PayloadError(ValueError):
    """Raised when a known message type carries an unusable payload."""


class UnknownType(ValueError):
    """Raised when a client message type is not part of the protocol."""


@dataclass(frozen=True)
class WireMessage:
    type: str
    fields: dict[str, Any] = field(default_factory=dict)

    def get(self, name: str, default: Any = None) -> Any:
        return self.fields.get(name, default)


def encode(msg: WireMessage) -> bytes:
    """One canonical JSON line, newline-terminated."""
    body = {"type": msg.type, **msg.fields}
    return json.dumps(body, sort_keys=True, separators=(",", ":")).encode() + b"\n"


def decode(data: bytes | str) -> WireMessage:
    """Parse one frame; extra fields are kept so round trips are lossless."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedFrame(f"frame is not UTF-8: {exc}") from exc
    try:
        body = json.loads(data)
    except ValueError as exc:
        raise MalformedFrame(f"frame is not JSON: {exc}") from exc
    if not isinstance(body, dict) or not isinstance(body.get("type"), str):
        raise MalformedFrame("frame must be a JSON object with a string 'type'")
    fields = dict(body)
    msg_type = fields.pop("type")
    return WireMessage(msg_type, fields)


def _is_str(v: Any) -> bool:
    return isinstance(v, str)


def _is_str_list(v: Any) -> bool:
    return isinstance(v, list) and all(isinstance(x, str) for x in v)


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


_REQUIRED: dict[str, dict[str, Any]] = {
    "hello": {},
    "configure": {},
    "suggestion_shown": {
        "suggestionId": _is_str,
        "docId": _is_str,
        "docContentHash": _is_str,
        "anchorLine": _is_int,
        "lines": _is_str_list,
    },
    "suggestion_accepted": {"suggestionId": _is_str},
    "suggestion_dismissed": {"suggestionId": _is_str},
    "hover": {"line": _is_int},
    "unhover": {},
    "explain_file": {"docId": _is_str, "lines": _is_str_list},
    "cancel_file": {"docId": _is_str},
}


def validate_client_message(msg: WireMessage) -> None:
    """Schema check for client frames; raises UnknownType or PayloadError."""
    if msg.type not in CLIENT_TYPES:
        raise UnknownType(f"unknown message type {msg.type!r}")
    for name, check in _REQUIRED[msg.type].items():
        if name not in msg.fields:
            raise PayloadError(f"{msg.type} requires field {name!r}")
        if not check(msg.fields[name]):
            raise PayloadError(f"{msg.type} field {name!r} has the wrong shape")
    if msg.type == "suggestion_shown":
        if not msg.fields["lines"]:
            raise PayloadError("suggestion_shown needs at least one line")
        if msg.fields["anchorLine"] < 0:
            raise PayloadError("anchorLine must be >= 0")
        ctx = msg.fields.get("precedingContext", [])
        if not _is_str_list(ctx):
            raise PayloadError("precedingContext must be a list of strings")
    if msg.type == "explain_file":
        if not msg.fields["lines"]:
            raise PayloadError("explain_file needs at least one line")
        granularity = msg.fields.get("granularity", "both")
        if granularity not in ("expressions", "blocks", "both"):
            raise PayloadError(f"unknown granularity {granularity!r}")
    if msg.type == "hover" and msg.fields["line"] < 0:
        raise PayloadError("hover line must be >= 0")


def suggestion_from_shown(msg: WireMessage) -> Suggestion:
    f = msg.fields
    return make_suggestion(
        suggestion_id=f["suggestionId"],
        doc_id=f["docId"],
        doc_content_hash=f["docContentHash"],
        anchor_line=f["anchorLine"],
        lines=f["lines"],
        preceding_context=f.get("precedingContext", []),
    )


# --- server -> client payload builders -------------------------------------

def ready_msg() -> WireMessage:
    return WireMessage("ready", {"protocolVersion": PROTOCOL_VERSION})


def status_msg(state: str, **extra: Any) -> WireMessage:
    return WireMessage("status", {"state": state, **extra})


def error_msg(code: str, message: str, **extra: Any) -> WireMessage:
    return WireMessage("error", {"code": code, "message": message, **extra})


def expression_payload(item: ExpressionExplanation) -> dict[str, Any]:
    return {
        "span": {
            "line": item.span.line,
            "colStart": item.span.col_start,
            "colEnd": item.span.col_end,
        },
        "text": item.text,
        "ordinal": item.ordinal,
    }


def expressions_msg(
    suggestion_id: str, line: int, items: tuple[ExpressionExplanation, ...], **extra: Any
) -> WireMessage:
    return WireMessage(
        "expressions",
        {
            "suggestionId": suggestion_id,
            "line": line,
            "items": [expression_payload(i) for i in items],
            **extra,
        },
    )


def block_msg(suggestion_id: str, block: BlockExplanation, **extra: Any) -> WireMessage:
    return WireMessage(
        "block",
        {
            "suggestionId": suggestion_id,
            "startLine": block.start_line,
            "endLine": block.end_line,
            "text": block.text,
            **extra,
        },
    )


def _label_payload(box: LabelBox) -> dict[str, Any]:
    leader = None
    if box.leader is not None:
        leader = {"fromCol": box.leader.from_col, "toCol": box.leader.to_col}
    return {
        "id": box.id,
        "kind": box.kind.value,
        "row": box.row,
        "col": box.col,
        "widthCols": box.width_cols,
        "heightRows": box.height_rows,
        "leader": leader,
        "colorIndex": box.color_index,
    }


def _margin_payload(box: MarginBox) -> dict[str, Any]:
    return {
        "blockRef": box.block_ref,
        "anchorCol": box.anchor_col,
        "rowStart": box.row_start,
        "rowEnd": box.row_end,
        "fade": box.fade,
        "leftBorder": box.left_border,
    }


def plan_payload(plan: LayoutPlan) -> dict[str, Any]:
    return {
        "labels": [_label_payload(b) for b in plan.labels],
        "margins": [_margin_payload(m) for m in plan.margins],
    }


def layout_msg(plan: LayoutPlan, **extra: Any) -> WireMessage:
    return WireMessage(
        "layout",
        {"suggestionId": plan.suggestion_id, **plan_payload(plan), **extra},
    )
