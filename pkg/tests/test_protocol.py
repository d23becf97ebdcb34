import pytest

from codegloss.layout import LabelBox, LabelKind, LayoutPlan, Leader, MarginBox
from codegloss.model import BlockExplanation, ExpressionExplanation, Span
from codegloss.protocol import (
    MalformedFrame,
    PayloadError,
    UnknownType,
    WireMessage,
    block_msg,
    decode,
    encode,
    error_msg,
    expressions_msg,
    layout_msg,
    ready_msg,
    status_msg,
    suggestion_from_shown,
    validate_client_message,
)

SHOWN_FIELDS = {
    "suggestionId": "s-1",
    "docId": "doc-1",
    "docContentHash": "ab" * 32,
    "anchorLine": 4,
    "lines": ["cv.Canny(img, 100, 200)"],
}


def corpus():
    """One representative message of every schema'd type, both directions."""
    item = ExpressionExplanation(Span(0, 0, 8), "Callee.", 0)
    plan = LayoutPlan(
        "s-1",
        labels=(
            LabelBox("expr:0:0", LabelKind.EXPRESSION, 5, 0, 10, 1, Leader(4, 0), 0),
        ),
        margins=(MarginBox(0, 62, 4, 6, False),),
    )
    return [
        WireMessage("hello", {"clientName": "test"}),
        WireMessage("configure", {"provider": {"providerKind": "mock"}, "grid": {"viewportCols": 100}}),
        WireMessage("suggestion_shown", dict(SHOWN_FIELDS, precedingContext=["import cv2"])),
        WireMessage("suggestion_accepted", {"suggestionId": "s-1"}),
        WireMessage("suggestion_dismissed", {"suggestionId": "s-1"}),
        WireMessage("hover", {"line": 3}),
        WireMessage("unhover", {}),
        WireMessage("explain_file", {"docId": "doc-1", "lines": ["a = 1", "b = 2"]}),
        WireMessage("cancel_file", {"docId": "doc-1"}),
        ready_msg(),
        expressions_msg("s-1", 0, (item,)),
        block_msg("s-1", BlockExplanation(0, 2, "Step 1: lines 0–2.")),
        layout_msg(plan),
        status_msg("pending", suggestionId="s-1"),
        error_msg("bad_payload", "nope"),
    ]


def test_round_trip_full_corpus():
    for msg in corpus():
        assert decode(encode(msg)) == msg


def test_encode_is_canonical_bytes():
    msg = WireMessage("status", {"b": 1, "a": 2, "state": "idle"})
    assert encode(msg) == b'{"a":2,"b":1,"state":"idle","type":"status"}\n'
    assert encode(msg) == encode(WireMessage("status", {"state": "idle", "a": 2, "b": 1}))


def test_decode_rejects_garbage():
    with pytest.raises(MalformedFrame):
        decode(b"not json\n")
    with pytest.raises(MalformedFrame):
        decode(b"[1, 2]\n")
    with pytest.raises(MalformedFrame):
        decode(b'{"no_type": 1}\n')
    with pytest.raises(MalformedFrame):
        decode(b"\xff\xfe\n")


def test_unknown_extra_fields_survive_round_trip():
    msg = decode(b'{"type":"hover","line":3,"x":1}\n')
    assert msg.fields["x"] == 1
    validate_client_message(msg)  # extras are ignored, not rejected
    assert decode(encode(msg)) == msg


def test_validate_unknown_type():
    with pytest.raises(UnknownType):
        validate_client_message(WireMessage("frobnicate", {}))


@pytest.mark.parametrize(
    "msg",
    [
        WireMessage("suggestion_shown", {}),
        WireMessage("suggestion_shown", dict(SHOWN_FIELDS, lines=[])),
        WireMessage("suggestion_shown", dict(SHOWN_FIELDS, lines=[1, 2])),
        WireMessage("suggestion_shown", dict(SHOWN_FIELDS, anchorLine=-1)),
        WireMessage("suggestion_shown", dict(SHOWN_FIELDS, anchorLine=True)),
        WireMessage("hover", {"line": "three"}),
        WireMessage("hover", {"line": -2}),
        WireMessage("hover", {}),
        WireMessage("explain_file", {"docId": "d", "lines": []}),
        WireMessage("explain_file", {"docId": "d", "lines": ["x"], "granularity": "bogus"}),
        WireMessage("suggestion_accepted", {}),
        WireMessage("cancel_file", {}),
    ],
)
def test_validate_bad_payloads(msg):
    with pytest.raises(PayloadError):
        validate_client_message(msg)


def test_validate_good_payloads():
    for msg in corpus():
        if msg.type in {"ready", "expressions", "block", "layout", "status", "error"}:
            continue
        validate_client_message(msg)


def test_suggestion_from_shown_caps_context():
    msg = WireMessage(
        "suggestion_shown",
        dict(SHOWN_FIELDS, precedingContext=[f"l{i}" for i in range(60)]),
    )
    s = suggestion_from_shown(msg)
    assert len(s.preceding_context) == 40
    assert s.anchor_line == 4


def test_server_messages_echo_their_subject():
    item = ExpressionExplanation(Span(2, 0, 3), "Txt.", 0)
    assert expressions_msg("s-9", 2, (item,)).fields["suggestionId"] == "s-9"
    assert block_msg("s-9", BlockExplanation(0, 1, "B.")).fields["suggestionId"] == "s-9"
    assert layout_msg(LayoutPlan("s-9")).fields["suggestionId"] == "s-9"
    assert status_msg("idle", suggestionId="s-9").fields["suggestionId"] == "s-9"


def test_layout_message_shape():
    plan = LayoutPlan(
        "s-1",
        labels=(LabelBox("expr:0:1", LabelKind.EXPRESSION, 3, 11, 5, 1, None, 1),),
        margins=(MarginBox(0, 82, 0, 4, True),),
    )
    fields = layout_msg(plan).fields
    label = fields["labels"][0]
    assert label == {
        "id": "expr:0:1",
        "kind": "expression",
        "row": 3,
        "col": 11,
        "widthCols": 5,
        "heightRows": 1,
        "leader": None,
        "colorIndex": 1,
    }
    margin = fields["margins"][0]
    assert margin == {
        "blockRef": 0,
        "anchorCol": 82,
        "rowStart": 0,
        "rowEnd": 4,
        "fade": True,
        "leftBorder": True,
    }
