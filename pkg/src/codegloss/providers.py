"""Explanation providers: the deterministic mock and the remote HTTP client.

Both speak the same interface: they take a rendered prompt and return (or
stream) raw text that the anchoring module then parses. The mock answers
from rule-based segmentation so the whole pipeline runs hermetically;
the remote provider talks to an HTTPS completion endpoint.
"""

from __future__ import annotations

import json
import os
import re
import threading
from typing import Iterator, Protocol

import httpx

from .anchoring import RawSegment
from .model import BlankLine, BlockExplanation, ProviderConfig, ProviderKind, TooShort
from .prompts import Prompt, PromptKind
from .splitting import Segment, SegmentKind, split_top_level

REQUEST_TIMEOUT_SECONDS = 30.0
_MOCK_STREAM_CHUNK = 24
_LINE_NUMBER_PREFIX = re.compile(r"^\d+: ")


class ProviderUnavailable(RuntimeError):
    """No request can be issued at all (bad endpoint, missing key, ...)."""


class ProviderRequestError(RuntimeError):
    """One request failed; other requests for the suggestion may proceed."""


class Provider(Protocol):
    deterministic: bool

    def preflight(self, cfg: ProviderConfig) -> None: ...

    def complete(
        self, prompt: Prompt, cfg: ProviderConfig, cancelled: threading.Event
    ) -> str: ...

    def stream(
        self, prompt: Prompt, cfg: ProviderConfig, cancelled: threading.Event
    ) -> Iterator[str]: ...


def mock_segment_line(line: str) -> list[RawSegment]:
    """Rule-based stand-in for LLM expression segmentation.

    A top-level call yields the callee and each argument; otherwise a
    top-level assignment yields both sides; otherwise the whole trimmed
    line is one segment. Explanations are templated from the segments.
    """
    if not line.strip():
        raise BlankLine("cannot segment a blank line")
    units = split_top_level(line)
    callee = next((u for u in units if u.kind is SegmentKind.CALLEE), None)
    if callee is not None:
        segs = [RawSegment(callee.text, f"Function being called: {callee.text}.")]
        args = [u for u in units if u.kind is SegmentKind.ARG]
        for k, arg in enumerate(args, 1):
            segs.append(
                RawSegment(arg.text, f"Argument {k} of {callee.text}: {arg.text}.")
            )
        return segs
    lhs = next((u for u in units if u.kind is SegmentKind.LHS), None)
    rhs = next((u for u in units if u.kind is SegmentKind.RHS), None)
    if lhs is not None or rhs is not None:
        segs = []
        if lhs is not None:
            segs.append(RawSegment(lhs.text, f"Assignment target: {lhs.text}."))
        if rhs is not None:
            target = lhs.text if lhs is not None else "the target"
            segs.append(RawSegment(rhs.text, f"Value assigned to {target}: {rhs.text}."))
        return segs
    whole: Segment = units[0]
    return [RawSegment(whole.text, f"Statement: {whole.text}.")]


def mock_block_segments(lines: list[str]) -> list[BlockExplanation]:
    """Rule-based stand-in for LLM block segmentation.

    Groups split at blank lines and at dedents back to column 0; every
    non-blank line lands in exactly one group.
    """
    if len(lines) < 2:
        raise TooShort("block segmentation needs at least two lines")
    groups: list[tuple[int, int]] = []
    start: int | None = None
    prev_indent: int | None = None
    for i, ln in enumerate(lines):
        if not ln.strip():
            if start is not None:
                groups.append((start, i - 1))
            start = None
            prev_indent = None
            continue
        indent = len(ln) - len(ln.lstrip())
        if start is None:
            start = i
        elif indent == 0 and prev_indent is not None and prev_indent > 0:
            groups.append((start, i - 1))
            start = i
        prev_indent = indent
    if start is not None:
        groups.append((start, len(lines) - 1))
    return [
        BlockExplanation(a, b, f"Step {n}: lines {a}–{b}.")
        for n, (a, b) in enumerate(groups, 1)
    ]


def _extract_target(prompt_text: str) -> list[str]:
    """Pull the code out of the prompt's final fenced block."""
    lines = prompt_text.split("\n")
    fence_rows = [
        i for i, ln in enumerate(lines) if len(ln) >= 3 and set(ln) == {"`"}
    ]
    if len(fence_rows) < 2:
        raise ProviderRequestError("prompt has no fenced target block")
    return lines[fence_rows[-2] + 1 : fence_rows[-1]]


class MockProvider:
    """Deterministic in-process provider; the default and the test anchor."""

    deterministic = True

    def preflight(self, cfg: ProviderConfig) -> None:
        return None

    def _payload(self, prompt: Prompt) -> str:
        target = _extract_target(prompt.text)
        if prompt.kind is PromptKind.EXPRESSION_LEVEL:
            segs = mock_segment_line("\n".join(target))
            return json.dumps(
                [{"segment": s.segment_text, "explanation": s.explanation} for s in segs]
            )
        code_lines = [_LINE_NUMBER_PREFIX.sub("", ln, count=1) for ln in target]
        blocks = mock_block_segments(code_lines)
        return json.dumps(
            [
                {"startLine": b.start_line, "endLine": b.end_line, "explanation": b.text}
                for b in blocks
            ]
        )

    def complete(
        self, prompt: Prompt, cfg: ProviderConfig, cancelled: threading.Event
    ) -> str:
        return self._payload(prompt)

    def stream(
        self, prompt: Prompt, cfg: ProviderConfig, cancelled: threading.Event
    ) -> Iterator[str]:
        payload = self._payload(prompt)
        for i in range(0, len(payload), _MOCK_STREAM_CHUNK):
            if cancelled.is_set():
                return
            yield payload[i : i + _MOCK_STREAM_CHUNK]


class RemoteProvider:
    """Client for an HTTPS JSON completion endpoint.

    The request body is {model, prompt, temperature, max_tokens, stream};
    streamed responses arrive as SSE-style ``data:`` lines. The API key is
    read from the environment variable named in the config and is never
    logged or echoed.
    """

    deterministic = False

    def __init__(self, transport: httpx.BaseTransport | None = None) -> None:
        self._client = httpx.Client(
            timeout=REQUEST_TIMEOUT_SECONDS, transport=transport
        )

    def preflight(self, cfg: ProviderConfig) -> None:
        if not cfg.endpoint_url:
            raise ProviderUnavailable("remote provider needs an endpoint URL")
        if cfg.api_key_env_var and cfg.api_key_env_var not in os.environ:
            raise ProviderUnavailable(
                f"environment variable {cfg.api_key_env_var} is not set"
            )

    def _headers(self, cfg: ProviderConfig) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(cfg.api_key_env_var, "") if cfg.api_key_env_var else ""
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _body(self, prompt: Prompt, cfg: ProviderConfig, stream: bool) -> dict:
        return {
            "model": cfg.model_id,
            "prompt": prompt.text,
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_tokens,
            "stream": stream,
        }

    @staticmethod
    def _text_of(payload: dict) -> str:
        choices = payload.get("choices")
        if isinstance(choices, list) and choices and isinstance(choices[0], dict):
            text = choices[0].get("text")
            if isinstance(text, str):
                return text
        text = payload.get("text")
        if isinstance(text, str):
            return text
        raise ProviderRequestError("completion response carries no text")

    def complete(
        self, prompt: Prompt, cfg: ProviderConfig, cancelled: threading.Event
    ) -> str:
        body = self._body(prompt, cfg, stream=False)
        last_error: Exception | None = None
        for attempt in range(2):  # one retry, transport errors only
            if cancelled.is_set():
                raise ProviderRequestError("cancelled")
            try:
                resp = self._client.post(
                    cfg.endpoint_url, json=body, headers=self._headers(cfg)
                )
                resp.raise_for_status()
                return self._text_of(resp.json())
            except httpx.TransportError as exc:
                last_error = exc
                continue
            except httpx.HTTPStatusError as exc:
                raise ProviderRequestError(
                    f"endpoint returned HTTP {exc.response.status_code}"
                ) from exc
            except (ValueError, KeyError) as exc:
                raise ProviderRequestError(f"malformed response: {exc}") from exc
        raise ProviderRequestError(f"transport failure: {last_error}")

    def stream(
        self, prompt: Prompt, cfg: ProviderConfig, cancelled: threading.Event
    ) -> Iterator[str]:
        body = self._body(prompt, cfg, stream=True)
        try:
            with self._client.stream(
                "POST", cfg.endpoint_url, json=body, headers=self._headers(cfg)
            ) as resp:
                resp.raise_for_status()
                for raw in resp.iter_lines():
                    if cancelled.is_set():
                        return
                    if not raw.startswith("data:"):
                        continue
                    data = raw[len("data:") :].strip()
                    if data == "[DONE]":
                        return
                    try:
                        yield self._text_of(json.loads(data))
                    except ValueError:
                        continue  # undecodable chunks are recovered by the final parse
        except httpx.HTTPStatusError as exc:
            raise ProviderRequestError(
                f"endpoint returned HTTP {exc.response.status_code}"
            ) from exc
        except httpx.TransportError as exc:
            raise ProviderRequestError(f"transport failure: {exc}") from exc


def provider_for(cfg: ProviderConfig) -> Provider:
    if cfg.provider_kind is ProviderKind.MOCK:
        return MockProvider()
    return RemoteProvider()
