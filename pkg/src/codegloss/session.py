"""The interactive session state machine.

One session holds at most one active suggestion. A new suggestion_shown
cancels whatever was running (silently when it replaces a flickering
suggestion for the same document inside the debounce window), acceptance
and dismissal cancel and clear, hover toggles which line's expression
labels appear in the layout, and explain_file treats the whole buffer as
one multi-line suggestion with a content-hash-keyed result cache.

handle_message and handle_event must be called from one logical thread;
the server's event loop serializes them. Pipeline cancellation may
happen from anywhere.
"""

from __future__ import annotations

import hashlib
import time
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from typing import Any, Callable

from .layout import GridMetrics, full_layout
from .model import (
    ExplanationSet,
    ExplanationStatus,
    ProviderConfig,
    ProviderKind,
    Suggestion,
    make_suggestion,
)
from .pipeline import (
    AllDone,
    BlockReady,
    ExplanationEvent,
    ExplanationPipeline,
    ExplanationStream,
    ExpressionsReady,
    RequestFailed,
    apply_event,
    finalize_set,
)
from .protocol import (
    PayloadError,
    UnknownType,
    WireMessage,
    block_msg,
    error_msg,
    expressions_msg,
    layout_msg,
    ready_msg,
    status_msg,
    suggestion_from_shown,
    validate_client_message,
)
from .providers import Provider, ProviderUnavailable, provider_for

DEBOUNCE_SECONDS = 0.150
CACHE_CAPACITY = 64


class _LruCache:
    def __init__(self, capacity: int) -> None:
        self._capacity = capacity
        self._items: OrderedDict[Any, Any] = OrderedDict()

    def get(self, key: Any) -> Any:
        if key not in self._items:
            return None
        self._items.move_to_end(key)
        return self._items[key]

    def put(self, key: Any, value: Any) -> None:
        self._items[key] = value
        self._items.move_to_end(key)
        while len(self._items) > self._capacity:
            self._items.popitem(last=False)

    def __len__(self) -> int:
        return len(self._items)


@dataclass
class _Active:
    suggestion: Suggestion
    explanations: ExplanationSet
    hover_line: int | None = None
    whole_file: bool = False
    doc_id: str = ""
    granularity: str = "both"
    shown_at: float = 0.0
    stream: ExplanationStream | None = None


@dataclass
class SessionState:
    """Mode is implied: idle when active is None, whole-file when flagged."""

    active: _Active | None = None
    cache: _LruCache = field(default_factory=lambda: _LruCache(CACHE_CAPACITY))

    @property
    def mode(self) -> str:
        if self.active is None:
            return "idle"
        return "whole_file" if self.active.whole_file else "explaining"


def content_hash(lines: list[str]) -> str:
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


class Session:
    """Applies client messages and pipeline events, producing outbound frames.

    ``spawn`` is called with each new ExplanationStream; the server
    installs a drainer that feeds events back through handle_event.
    Tests may omit it and drive the stream by hand.
    """

    def __init__(
        self,
        provider_config: ProviderConfig | None = None,
        metrics: GridMetrics | None = None,
        provider: Provider | None = None,
        pipeline: ExplanationPipeline | None = None,
        spawn: Callable[[ExplanationStream], None] | None = None,
        clock: Callable[[], float] = time.monotonic,
        provider_factory: Callable[[ProviderConfig], Provider] = provider_for,
    ) -> None:
        self.config = provider_config or ProviderConfig()
        self.metrics = metrics or GridMetrics()
        self._provider_factory = provider_factory
        self.provider = provider or provider_factory(self.config)
        self.pipeline = pipeline or ExplanationPipeline()
        self.spawn = spawn
        self.clock = clock
        self.state = SessionState()

    # -- message entry points ------------------------------------------------

    def handle_message(self, msg: WireMessage) -> list[WireMessage]:
        try:
            validate_client_message(msg)
        except UnknownType as exc:
            return [error_msg("unknown_type", str(exc))]
        except PayloadError as exc:
            return [error_msg("bad_payload", str(exc))]
        handler = getattr(self, f"_on_{msg.type}")
        return handler(msg)

    def handle_event(self, suggestion_id: str, event: ExplanationEvent) -> list[WireMessage]:
        """Fold one pipeline event; events for anything but the live run are dropped."""
        active = self.state.active
        if active is None or active.suggestion.suggestion_id != suggestion_id:
            return []
        sid = suggestion_id
        extra = {"docId": active.doc_id} if active.whole_file else {}
        if isinstance(event, (ExpressionsReady, BlockReady)):
            active.explanations = apply_event(active.explanations, event)
            plan = full_layout(
                active.suggestion, active.explanations, active.hover_line, self.metrics
            )
            if isinstance(event, ExpressionsReady):
                content = expressions_msg(sid, event.line, event.items, **extra)
            else:
                content = block_msg(sid, event.block, **extra)
            return [content, layout_msg(plan, **extra)]
        if isinstance(event, RequestFailed):
            active.explanations = apply_event(active.explanations, event)
            where = {} if event.line is None else {"line": event.line}
            return [
                status_msg(
                    "request_failed",
                    suggestionId=sid,
                    reason=event.reason,
                    **where,
                    **extra,
                )
            ]
        if isinstance(event, AllDone):
            final = finalize_set(
                active.explanations, active.suggestion, active.granularity
            )
            active.explanations = final
            if active.whole_file and final.status is ExplanationStatus.COMPLETE:
                key = (active.suggestion.doc_content_hash, active.granularity)
                self.state.cache.put(key, final)
            return [status_msg(final.status.value, suggestionId=sid, **extra)]
        return []

    # -- client message handlers ----------------------------------------------

    def _on_hello(self, msg: WireMessage) -> list[WireMessage]:
        return [ready_msg()]

    def _on_configure(self, msg: WireMessage) -> list[WireMessage]:
        provider_fields = msg.get("provider") or {}
        grid_fields = msg.get("grid") or {}
        try:
            if provider_fields:
                self.config = _merge_provider_config(self.config, provider_fields)
                self.provider = self._provider_factory(self.config)
            if grid_fields:
                self.metrics = _merge_grid(self.metrics, grid_fields)
        except (ValueError, TypeError, KeyError) as exc:
            return [error_msg("bad_payload", f"configure rejected: {exc}")]
        return [status_msg("configured")]

    def _on_suggestion_shown(self, msg: WireMessage) -> list[WireMessage]:
        try:
            suggestion = suggestion_from_shown(msg)
        except ValueError as exc:
            return [error_msg("bad_payload", str(exc))]
        out: list[WireMessage] = []
        now = self.clock()
        prior = self.state.active
        if prior is not None:
            self._cancel_active()
            debounced = (
                not prior.whole_file
                and prior.suggestion.doc_id == suggestion.doc_id
                and now - prior.shown_at < DEBOUNCE_SECONDS
            )
            if not debounced:
                prior_id = prior.suggestion.suggestion_id
                out.append(status_msg("idle", suggestionId=prior_id))
        active = _Active(
            suggestion=suggestion,
            explanations=ExplanationSet(suggestion_id=suggestion.suggestion_id),
            doc_id=suggestion.doc_id,
            shown_at=now,
        )
        self.state.active = active
        try:
            self._start(active)
        except ProviderUnavailable as exc:
            self.state.active = None
            out.append(
                status_msg(
                    "failed", suggestionId=suggestion.suggestion_id, reason=str(exc)
                )
            )
            return out
        out.append(status_msg("pending", suggestionId=suggestion.suggestion_id))
        return out

    def _on_suggestion_accepted(self, msg: WireMessage) -> list[WireMessage]:
        return self._dismiss(msg.fields["suggestionId"])

    def _on_suggestion_dismissed(self, msg: WireMessage) -> list[WireMessage]:
        return self._dismiss(msg.fields["suggestionId"])

    def _on_hover(self, msg: WireMessage) -> list[WireMessage]:
        active = self.state.active
        if active is None:
            return [error_msg("no_active", "hover with nothing being explained")]
        active.hover_line = msg.fields["line"]
        return [self._layout_now()]

    def _on_unhover(self, msg: WireMessage) -> list[WireMessage]:
        active = self.state.active
        if active is None:
            return [error_msg("no_active", "unhover with nothing being explained")]
        active.hover_line = None
        return [self._layout_now()]

    def _on_explain_file(self, msg: WireMessage) -> list[WireMessage]:
        doc_id = msg.fields["docId"]
        lines = msg.fields["lines"]
        granularity = msg.get("granularity", "both")
        digest = content_hash(lines)
        suggestion = make_suggestion(
            suggestion_id=f"file:{doc_id}:{digest[:12]}",
            doc_id=doc_id,
            doc_content_hash=digest,
            anchor_line=0,
            lines=lines,
        )
        out: list[WireMessage] = []
        prior = self.state.active
        if prior is not None:
            self._cancel_active()
            out.append(
                status_msg("idle", suggestionId=prior.suggestion.suggestion_id)
            )
        cached = self.state.cache.get((digest, granularity))
        if cached is not None:
            self.state.active = _Active(
                suggestion=suggestion,
                explanations=cached,
                whole_file=True,
                doc_id=doc_id,
                granularity=granularity,
                shown_at=self.clock(),
            )
            out.append(status_msg("pending", suggestionId=suggestion.suggestion_id, docId=doc_id))
            out.extend(self._replay(suggestion, cached, doc_id))
            return out
        active = _Active(
            suggestion=suggestion,
            explanations=ExplanationSet(suggestion_id=suggestion.suggestion_id),
            whole_file=True,
            doc_id=doc_id,
            granularity=granularity,
            shown_at=self.clock(),
        )
        self.state.active = active
        try:
            self._start(active)
        except ProviderUnavailable as exc:
            self.state.active = None
            out.append(
                status_msg(
                    "failed",
                    suggestionId=suggestion.suggestion_id,
                    docId=doc_id,
                    reason=str(exc),
                )
            )
            return out
        out.append(
            status_msg("pending", suggestionId=suggestion.suggestion_id, docId=doc_id)
        )
        return out

    def _on_cancel_file(self, msg: WireMessage) -> list[WireMessage]:
        doc_id = msg.fields["docId"]
        active = self.state.active
        if active is not None and active.whole_file and active.doc_id == doc_id:
            self._cancel_active()
            sid = active.suggestion.suggestion_id
            self.state.active = None
            return [status_msg("idle", suggestionId=sid, docId=doc_id)]
        return [status_msg("idle", docId=doc_id)]

    # -- internals -------------------------------------------------------------

    def _dismiss(self, suggestion_id: str) -> list[WireMessage]:
        active = self.state.active
        if active is not None and active.suggestion.suggestion_id == suggestion_id:
            self._cancel_active()
            self.state.active = None
        return [status_msg("idle", suggestionId=suggestion_id)]

    def _cancel_active(self) -> None:
        active = self.state.active
        if active is not None:
            self.pipeline.cancel(active.suggestion.suggestion_id)

    def _start(self, active: _Active) -> None:
        stream = self.pipeline.request_explanations(
            active.suggestion, self.config, self.provider, active.granularity
        )
        active.stream = stream
        if self.spawn is not None:
            self.spawn(stream)

    def _layout_now(self) -> WireMessage:
        active = self.state.active
        assert active is not None
        plan = full_layout(
            active.suggestion, active.explanations, active.hover_line, self.metrics
        )
        extra = {"docId": active.doc_id} if active.whole_file else {}
        return layout_msg(plan, **extra)

    def _replay(
        self, suggestion: Suggestion, cached: ExplanationSet, doc_id: str
    ) -> list[WireMessage]:
        """Re-emit a cached run exactly as the live mock run produced it.

        The live deterministic order is blocks ascending, then expression
        lines ascending, with a fresh layout after each content message,
        then the final status.
        """
        out: list[WireMessage] = []
        es = ExplanationSet(suggestion_id=suggestion.suggestion_id)
        active = self.state.active
        assert active is not None
        for event in _canonical_events(cached):
            es = apply_event(es, event)
            plan = full_layout(suggestion, es, active.hover_line, self.metrics)
            if isinstance(event, ExpressionsReady):
                out.append(
                    expressions_msg(
                        suggestion.suggestion_id, event.line, event.items, docId=doc_id
                    )
                )
            else:
                out.append(block_msg(suggestion.suggestion_id, event.block, docId=doc_id))
            out.append(layout_msg(plan, docId=doc_id))
        active.explanations = cached
        out.append(
            status_msg(
                cached.status.value,
                suggestionId=suggestion.suggestion_id,
                docId=doc_id,
            )
        )
        return out


def _canonical_events(es: ExplanationSet) -> list[ExplanationEvent]:
    events: list[ExplanationEvent] = [BlockReady(b) for b in es.blocks]
    for line in sorted(es.expressions_by_line):
        events.append(ExpressionsReady(line, es.expressions_by_line[line]))
    return events


def _merge_provider_config(cfg: ProviderConfig, fields: dict) -> ProviderConfig:
    mapping = {
        "providerKind": ("provider_kind", lambda v: ProviderKind(v)),
        "modelId": ("model_id", str),
        "temperature": ("temperature", float),
        "maxTokens": ("max_tokens", int),
        "stream": ("stream", bool),
        "endpointUrl": ("endpoint_url", str),
        "apiKeyEnvVar": ("api_key_env_var", str),
    }
    updates = {}
    for wire_name, (attr, convert) in mapping.items():
        if wire_name in fields:
            updates[attr] = convert(fields[wire_name])
    return replace(cfg, **updates)


def _merge_grid(metrics: GridMetrics, fields: dict) -> GridMetrics:
    mapping = {
        "viewportCols": "viewport_cols",
        "labelMaxWidthCols": "label_max_width_cols",
        "labelPaddingCols": "label_padding_cols",
        "marginGapCols": "margin_gap_cols",
    }
    updates = {}
    for wire_name, attr in mapping.items():
        if wire_name in fields:
            updates[attr] = int(fields[wire_name])
    return replace(metrics, **updates)
