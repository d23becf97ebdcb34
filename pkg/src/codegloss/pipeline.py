"""Request fan-out, event streaming, and cancellation.

A multi-line suggestion issues one streaming block request plus one
expression request per line. Results surface as an ordered stream of
events: block events always come out in ascending start-line order,
expression events carry their line tag and may interleave, and the
stream ends with exactly one AllDone once every sub-request settled.

The deterministic mock runs its sub-requests on a single worker in a
fixed order (block first, then lines top to bottom), which makes whole
transcripts reproducible byte for byte. Other providers get real
concurrency.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass, replace
from queue import SimpleQueue
from typing import Iterator, Union

from .anchoring import (
    Unparseable,
    anchor_segments,
    block_entry_shaped,
    blocks_from_entries,
    parse_block_payload,
    parse_expression_payload,
)
from .model import (
    BlockExplanation,
    ExpressionExplanation,
    ExplanationSet,
    ExplanationStatus,
    ProviderConfig,
    Suggestion,
    SuggestionKind,
    suggestion_kind,
)
from .prompts import build_block_prompt, build_expression_prompt
from .providers import Provider, ProviderRequestError, ProviderUnavailable

_MAX_WORKERS = 8

GRANULARITY_EXPRESSIONS = "expressions"
GRANULARITY_BLOCKS = "blocks"
GRANULARITY_BOTH = "both"


@dataclass(frozen=True)
class ExpressionsReady:
    line: int
    items: tuple[ExpressionExplanation, ...]


@dataclass(frozen=True)
class BlockReady:
    block: BlockExplanation


@dataclass(frozen=True)
class RequestFailed:
    line: int | None  # None marks the block request
    reason: str


@dataclass(frozen=True)
class AllDone:
    pass


ExplanationEvent = Union[ExpressionsReady, BlockReady, RequestFailed, AllDone]

_SENTINEL = object()


class ExplanationStream:
    """Single-consumer event stream with thread-safe cancellation.

    After :meth:`cancel` returns, iteration yields nothing more: events
    still in flight are dropped on both the producer and consumer side.
    """

    def __init__(self, suggestion_id: str) -> None:
        self.suggestion_id = suggestion_id
        self._queue: SimpleQueue = SimpleQueue()
        self._cancelled = threading.Event()
        self._exhausted = False  # consumer-side only

    @property
    def cancelled(self) -> bool:
        return self._cancelled.is_set()

    def cancel(self) -> None:
        if not self._cancelled.is_set():
            self._cancelled.set()
            self._queue.put(_SENTINEL)  # unblock a waiting consumer

    def _emit(self, event: ExplanationEvent) -> None:
        if not self._cancelled.is_set():
            self._queue.put(event)

    def _finish(self) -> None:
        self._queue.put(_SENTINEL)

    def __iter__(self) -> Iterator[ExplanationEvent]:
        return self

    def __next__(self) -> ExplanationEvent:
        if self._exhausted or self._cancelled.is_set():
            raise StopIteration
        item = self._queue.get()
        if item is _SENTINEL or self._cancelled.is_set():
            self._exhausted = True
            raise StopIteration
        return item


class _OrderedBlockEmitter:
    """Forces ascending, disjoint block emission while still streaming.

    Blocks that arrive in ascending order flow straight through. A block
    overlapping what was already emitted is truncated to start after it;
    one that lies entirely behind is dropped. Sane providers emit in
    order and lose nothing.
    """

    def __init__(self) -> None:
        self._last_end = -1

    def accept(self, block: BlockExplanation) -> BlockExplanation | None:
        if block.start_line <= self._last_end:
            if block.end_line <= self._last_end:
                return None
            block = replace(block, start_line=self._last_end + 1)
        self._last_end = block.end_line
        return block


class _BlockStreamParser:
    """Pulls completed block objects out of an incrementally growing payload."""

    def __init__(self, line_count: int) -> None:
        self._line_count = line_count
        self._buffer = ""
        self._pos: int | None = None  # decode position inside the array
        self._closed = False
        self.decoded_any = False
        self._decoder = json.JSONDecoder()

    def feed(self, chunk: str) -> list[BlockExplanation]:
        self._buffer += chunk
        return self._drain()

    def finish(self) -> list[BlockExplanation]:
        """Last chance: full-text parse when incremental decoding found nothing."""
        if self.decoded_any:
            return []
        return parse_block_payload(self._buffer, self._line_count)

    def _drain(self) -> list[BlockExplanation]:
        if self._closed:
            return []
        if self._pos is None:
            start = self._buffer.find("[")
            if start == -1:
                return []
            self._pos = start + 1
        out: list[BlockExplanation] = []
        while True:
            while self._pos < len(self._buffer) and self._buffer[self._pos] in ", \t\r\n":
                self._pos += 1
            if self._pos >= len(self._buffer):
                break
            if self._buffer[self._pos] == "]":
                self._closed = True
                break
            try:
                value, end = self._decoder.raw_decode(self._buffer, self._pos)
            except ValueError:
                break  # most likely a partial object; wait for more input
            self._pos = end
            if not block_entry_shaped(value):
                continue
            blocks = blocks_from_entries([value], self._line_count)
            if blocks:
                self.decoded_any = True
                out.extend(blocks)
        return out


class ExplanationPipeline:
    """Issues sub-requests for suggestions and tracks live streams for cancel."""

    def __init__(self) -> None:
        self._active: dict[str, ExplanationStream] = {}
        self._lock = threading.Lock()

    def request_explanations(
        self,
        s: Suggestion,
        cfg: ProviderConfig,
        provider: Provider,
        granularity: str = GRANULARITY_BOTH,
    ) -> ExplanationStream:
        """Start all sub-requests for a suggestion; returns the event stream.

        Raises ProviderUnavailable only when no request could be issued at
        all; individual failures surface as RequestFailed events instead.
        """
        provider.preflight(cfg)
        stream = ExplanationStream(s.suggestion_id)
        with self._lock:
            prior = self._active.get(s.suggestion_id)
            if prior is not None:
                prior.cancel()
            self._active[s.suggestion_id] = stream
        runner = threading.Thread(
            target=self._run,
            args=(s, cfg, provider, stream, granularity),
            name=f"explain-{s.suggestion_id}",
            daemon=True,
        )
        runner.start()
        return stream

    def cancel(self, suggestion_id: str) -> None:
        """Stop event delivery for the suggestion; unknown ids are a no-op."""
        with self._lock:
            stream = self._active.get(suggestion_id)
        if stream is not None:
            stream.cancel()

    def _run(
        self,
        s: Suggestion,
        cfg: ProviderConfig,
        provider: Provider,
        stream: ExplanationStream,
        granularity: str,
    ) -> None:
        kind = suggestion_kind(s)
        want_blocks = (
            kind is SuggestionKind.MULTI_LINE
            and granularity in (GRANULARITY_BLOCKS, GRANULARITY_BOTH)
        )
        want_expressions = (
            kind is SuggestionKind.SINGLE_LINE
            or granularity in (GRANULARITY_EXPRESSIONS, GRANULARITY_BOTH)
        )
        tasks = []
        if want_blocks:
            tasks.append(lambda: self._block_task(s, cfg, provider, stream))
        if want_expressions:
            for idx, line in enumerate(s.lines):
                if not line.strip():
                    # A blank line has nothing to ask about; record it settled,
                    # in order with its siblings.
                    tasks.append(
                        lambda idx=idx: stream._emit(ExpressionsReady(idx, ()))
                    )
                    continue
                tasks.append(
                    lambda idx=idx, line=line: self._expression_task(
                        s, idx, line, cfg, provider, stream
                    )
                )
        workers = 1 if getattr(provider, "deterministic", False) else min(
            len(tasks) or 1, _MAX_WORKERS
        )
        try:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(task) for task in tasks]
                wait(futures)
        finally:
            stream._emit(AllDone())
            stream._finish()
            with self._lock:
                if self._active.get(s.suggestion_id) is stream:
                    del self._active[s.suggestion_id]

    def _context_for(self, s: Suggestion, line_index: int) -> list[str]:
        context = list(s.preceding_context) + list(s.lines[:line_index])
        return context[-40:]

    def _expression_task(
        self,
        s: Suggestion,
        idx: int,
        line: str,
        cfg: ProviderConfig,
        provider: Provider,
        stream: ExplanationStream,
    ) -> None:
        if stream.cancelled:
            return
        try:
            prompt = build_expression_prompt(
                line, self._context_for(s, idx), target_line=idx
            )
            payload = provider.complete(prompt, cfg, stream._cancelled)
            segments = parse_expression_payload(payload)
            items = anchor_segments(line, segments, line_index=idx)
            stream._emit(ExpressionsReady(idx, tuple(items)))
        except (ProviderRequestError, Unparseable, ValueError) as exc:
            stream._emit(RequestFailed(idx, str(exc)))

    def _block_task(
        self,
        s: Suggestion,
        cfg: ProviderConfig,
        provider: Provider,
        stream: ExplanationStream,
    ) -> None:
        if stream.cancelled:
            return
        emitter = _OrderedBlockEmitter()
        parser = _BlockStreamParser(len(s.lines))
        emitted = 0
        try:
            prompt = build_block_prompt(list(s.lines), list(s.preceding_context))
            if cfg.stream:
                chunks = provider.stream(prompt, cfg, stream._cancelled)
            else:
                chunks = iter([provider.complete(prompt, cfg, stream._cancelled)])
            for chunk in chunks:
                if stream.cancelled:
                    return
                for block in parser.feed(chunk):
                    accepted = emitter.accept(block)
                    if accepted is not None:
                        emitted += 1
                        stream._emit(BlockReady(accepted))
            try:
                leftovers = parser.finish()
            except Unparseable:
                if emitted == 0:
                    raise
                leftovers = []
            for block in leftovers:
                accepted = emitter.accept(block)
                if accepted is not None:
                    emitted += 1
                    stream._emit(BlockReady(accepted))
        except (ProviderRequestError, Unparseable, ValueError) as exc:
            stream._emit(RequestFailed(None, str(exc)))


def apply_event(es: ExplanationSet, event: ExplanationEvent) -> ExplanationSet:
    """Fold one pipeline event into the evolving set."""
    if isinstance(event, ExpressionsReady):
        es = es.with_expressions(event.line, event.items)
    elif isinstance(event, BlockReady):
        es = es.with_block(event.block)
    elif isinstance(event, RequestFailed):
        es = es.with_failure(event.line, event.reason)
    if es.status is ExplanationStatus.PENDING and not isinstance(event, AllDone):
        es = replace(es, status=ExplanationStatus.PARTIAL)
    return es


def finalize_set(
    es: ExplanationSet, s: Suggestion, granularity: str = GRANULARITY_BOTH
) -> ExplanationSet:
    """Resolve the final status once AllDone arrived.

    Complete means every requested sub-result is present; failures
    downgrade to Partial (or Failed when nothing at all arrived).
    """
    kind = suggestion_kind(s)
    want_blocks = kind is SuggestionKind.MULTI_LINE and granularity in (
        GRANULARITY_BLOCKS,
        GRANULARITY_BOTH,
    )
    want_expressions = kind is SuggestionKind.SINGLE_LINE or granularity in (
        GRANULARITY_EXPRESSIONS,
        GRANULARITY_BOTH,
    )
    block_failed = any(line is None for line, _ in es.failures)
    if want_blocks and not es.blocks and not block_failed:
        es = replace(es, blocks_validated_empty=True)
    has_content = bool(es.blocks) or any(
        items for items in es.expressions_by_line.values()
    )
    if es.failures:
        status = (
            ExplanationStatus.PARTIAL if has_content else ExplanationStatus.FAILED
        )
        return replace(es, status=status)
    complete = True
    if want_expressions:
        complete = all(i in es.expressions_by_line for i in range(len(s.lines)))
    return replace(
        es,
        status=ExplanationStatus.COMPLETE if complete else ExplanationStatus.PARTIAL,
    )


def collect(
    s: Suggestion,
    cfg: ProviderConfig,
    provider: Provider,
    granularity: str = GRANULARITY_BOTH,
    pipeline: ExplanationPipeline | None = None,
) -> ExplanationSet:
    """Run the pipeline to completion and return the finished set."""
    pipeline = pipeline or ExplanationPipeline()
    stream = pipeline.request_explanations(s, cfg, provider, granularity)
    es = ExplanationSet(suggestion_id=s.suggestion_id)
    for event in stream:
        es = apply_event(es, event)
    return finalize_set(es, s, granularity)
