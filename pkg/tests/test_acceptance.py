"""Acceptance gate: one test per release criterion, run with -v for the list.

Everything here is hermetic: the deterministic mock provider or local
fakes stand in for the network, and every expected value was computed
with the independent oracles in oracles.py before being frozen.
"""

import json
import random
import time
from pathlib import Path

from codegloss.anchoring import RawSegment, anchor_segments, validate_expressions
from codegloss.layout import GridMetrics, layout_blocks, layout_expressions
from codegloss.model import (
    BlockExplanation,
    ExpressionExplanation,
    ProviderConfig,
    Span,
    check_consistency,
)
from codegloss.pipeline import (
    AllDone,
    BlockReady,
    ExplanationPipeline,
    ExpressionsReady,
    RequestFailed,
    collect,
)
from codegloss.protocol import WireMessage, decode, encode
from codegloss.providers import MockProvider, mock_segment_line
from codegloss.session import Session
from codegloss.splitting import split_top_level
from conftest import CANNY_LINE, GAUSSIAN_LINE, THREE_LINES, suggestion_of
from fakes import CountingProvider, JitterProvider
from oracles import (
    any_overlap,
    check_expression_placement,
    reference_anchor,
)
import test_server
from test_session import ManualPipeline, drain_into_session, item, shown_msg

DATA = Path(__file__).parent / "data"
METRICS = GridMetrics()
CFG = ProviderConfig()

CANNY_SPANS = [(0, 8), (9, 12), (14, 17), (19, 22)]  # verified via reference_anchor


def test_c1_end_to_end_mock_canny_spans_and_layout_under_one_second():
    """explain on the Canny line: exact spans, clean layout, < 1 s."""
    assert (
        reference_anchor(CANNY_LINE, ["cv.Canny", "img", "100", "200"]) == CANNY_SPANS
    )
    started = time.monotonic()
    s = suggestion_of(CANNY_LINE)
    es = collect(s, CFG, MockProvider())
    items = list(es.expressions_by_line[0])
    boxes = layout_expressions(len(CANNY_LINE), items, METRICS)
    elapsed = time.monotonic() - started
    assert [(i.span.col_start, i.span.col_end) for i in items] == CANNY_SPANS
    assert len(items) == 4
    assert not any_overlap(boxes)
    assert check_consistency(s, es)
    assert elapsed < 1.0, f"took {elapsed:.3f}s"


def test_c2_layout_properties_on_randomized_sets():
    """1000 random label sets: no box overlap, leader biconditional, margin formula."""
    rng = random.Random(20240901)
    for _ in range(1000):
        labels = []
        col = 0
        for ordinal in range(rng.randint(1, 10)):
            start = col + rng.randint(0, 6)
            end = start + rng.randint(1, 10)
            text = " ".join("w" * rng.randint(1, 30) for _ in range(rng.randint(1, 5))) + "."
            labels.append(ExpressionExplanation(Span(0, start, end), text, ordinal))
            col = end
        boxes = layout_expressions(col + 1, labels, METRICS)
        assert not any_overlap(boxes)
        problems = check_expression_placement(labels, boxes)
        assert problems == [], problems

    for _ in range(1000):
        lengths = [rng.randint(0, 160) for _ in range(rng.randint(1, 40))]
        end = rng.randint(0, len(lengths) - 1)
        start = rng.randint(0, end)
        margins = layout_blocks(
            lengths, (BlockExplanation(start, end, "Step."),), METRICS
        )
        assert margins[0].anchor_col == min(max(lengths), 80) + 2


def test_c3_anchoring_oracle_equivalence_and_splitter_round_trip():
    """10k fuzzed anchoring cases match the oracle; 1k call lines round-trip."""
    rng = random.Random(424242)
    alphabet = "abcx(), =."
    for _ in range(10_000):
        line = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 40)))
        pieces = []
        for _ in range(rng.randint(1, 6)):
            i = rng.randrange(len(line))
            j = rng.randint(i + 1, min(len(line), i + 8))
            if line[i:j].strip():
                pieces.append(line[i:j])
        expected = reference_anchor(line, pieces)
        got = anchor_segments(line, [RawSegment(p, "Ok.") for p in pieces])
        assert [(i.span.col_start, i.span.col_end) for i in got] == expected

    names = ["cv.Canny", "img", "f", "np.dot", "x9", "df.merge"]
    literals = ["100", "(5, 5)", "'a,b'", '"x, y"', "[1, 2]"]
    for _ in range(1000):
        callee = rng.choice(names)
        args = [rng.choice(names + literals) for _ in range(rng.randint(0, 4))]
        line = f"{callee}({', '.join(args)})"
        units = split_top_level(line)
        got = anchor_segments(line, [RawSegment(u.text, "Ok.") for u in units])
        assert [(i.span.col_start, i.span.col_end) for i in got] == [
            (u.col_start, u.col_end) for u in units
        ], line


def test_c4_validator_fixtures_and_seeded_corruptions():
    """Mock output validates clean; each corruption flips exactly its flag."""
    for line in (CANNY_LINE, GAUSSIAN_LINE):
        report = validate_expressions(line, anchor_segments(line, mock_segment_line(line)))
        assert report.complete and report.accurate_bounds and report.proper_segmentation

    items = anchor_segments(CANNY_LINE, mock_segment_line(CANNY_LINE))

    missing_arg = [i for i in items if i.span.col_start != 19]
    r1 = validate_expressions(CANNY_LINE, missing_arg)
    assert (r1.complete, r1.accurate_bounds, r1.proper_segmentation) == (False, True, True)

    comma_bleed = [
        items[0],
        ExpressionExplanation(Span(0, 9, 13), items[1].text, items[1].ordinal),
        items[2],
        items[3],
    ]
    r2 = validate_expressions(CANNY_LINE, comma_bleed)
    assert (r2.complete, r2.accurate_bounds, r2.proper_segmentation) == (True, True, False)

    mid_token = [
        items[0],
        ExpressionExplanation(Span(0, 9, 11), items[1].text, items[1].ordinal),
        items[2],
        items[3],
    ]
    r3 = validate_expressions(CANNY_LINE, mid_token)
    assert (r3.complete, r3.accurate_bounds, r3.proper_segmentation) == (True, False, True)


def test_c5_protocol_golden_transcript_cancellation_fuzz_and_round_trip():
    """Transcript replays byte-stable; 1k dismissal schedules stay silent; codec is lossless."""
    test_server.test_golden_transcript_replays_byte_stable()

    rng = random.Random(555)
    canned = [
        ExpressionsReady(0, (item(0, 0, 3),)),
        ExpressionsReady(1, ()),
        BlockReady(BlockExplanation(0, 2, "Step 1: lines 0–2.")),
        RequestFailed(1, "late"),
        AllDone(),
    ]
    for trial in range(1000):
        session = Session(pipeline=ManualPipeline(), provider=MockProvider())
        sid = f"fz-{trial}"
        session.handle_message(shown_msg(sid, lines=THREE_LINES))
        schedule = [canned[rng.randrange(len(canned))] for _ in range(rng.randint(0, 5))]
        cut = rng.randint(0, len(schedule))
        for step, event in enumerate(schedule):
            if step == cut:
                session.handle_message(
                    WireMessage("suggestion_dismissed", {"suggestionId": sid})
                )
            out = session.handle_event(sid, event)
            if step >= cut:
                assert out == [], trial
        if cut >= len(schedule):
            session.handle_message(
                WireMessage("suggestion_dismissed", {"suggestionId": sid})
            )
        for event in canned:
            assert session.handle_event(sid, event) == [], trial

    from test_protocol import corpus

    for msg in corpus():
        assert decode(encode(msg)) == msg


def test_c6_pipeline_ordering_under_randomized_latency_and_fan_out():
    """500 jittered trials: blocks ascending, AllDone last; n+1 sub-requests."""
    base = random.Random(301)
    lines = ["a = 1", "b = 2", "", "c = 3", "d = 4"]
    for trial in range(500):
        rng = random.Random(base.random())
        provider = JitterProvider(rng, shuffle_blocks=trial % 5 == 0, max_delay=0.0015)
        s = suggestion_of(lines, suggestion_id=f"acc-{trial}")
        events = list(
            ExplanationPipeline().request_explanations(s, CFG, provider)
        )
        assert isinstance(events[-1], AllDone)
        assert sum(isinstance(e, AllDone) for e in events) == 1
        starts = [e.block.start_line for e in events if isinstance(e, BlockReady)]
        assert starts == sorted(starts)

    for n in (2, 4, 7):
        s = suggestion_of([f"v{i} = {i}" for i in range(n)])
        counting = CountingProvider()
        collect(s, CFG, counting)
        assert counting.total == n + 1


def test_c7_whole_file_cache_suppresses_provider_traffic():
    """Second explain_file on identical content issues zero provider calls."""
    counting = CountingProvider()
    session = Session(pipeline=ExplanationPipeline(), provider=counting)
    lines = ["a = 1", "b = 2", "", "c = 3"]
    msg = WireMessage("explain_file", {"docId": "doc-acc", "lines": lines})

    session.handle_message(msg)
    first_content = [
        m for m in drain_into_session(session) if m.type in {"expressions", "block", "layout"}
    ]
    before = counting.total
    second = session.handle_message(msg)
    assert counting.total == before, "cache hit must not touch the provider"
    second_content = [m for m in second if m.type in {"expressions", "block", "layout"}]
    assert [encode(m) for m in second_content] == [encode(m) for m in first_content]
