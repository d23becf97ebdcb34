"""Fake providers for exercising the pipeline without a network."""

from __future__ import annotations

import json
import random
import threading
import time

from codegloss.prompts import Prompt, PromptKind
from codegloss.providers import MockProvider, ProviderRequestError


class JitterProvider:
    """Mock behaviour plus randomized latency and optional block shuffling."""

    deterministic = False

    def __init__(
        self,
        rng: random.Random,
        shuffle_blocks: bool = False,
        max_delay: float = 0.002,
    ) -> None:
        self._rng = rng
        self._shuffle = shuffle_blocks
        self._max_delay = max_delay
        self._mock = MockProvider()
        self._lock = threading.Lock()

    def _nap(self) -> None:
        with self._lock:
            delay = self._rng.uniform(0, self._max_delay)
        time.sleep(delay)

    def preflight(self, cfg) -> None:
        return None

    def complete(self, prompt: Prompt, cfg, cancelled) -> str:
        self._nap()
        return self._mock.complete(prompt, cfg, cancelled)

    def stream(self, prompt: Prompt, cfg, cancelled):
        payload = self._mock.complete(prompt, cfg, cancelled)
        if self._shuffle and prompt.kind is PromptKind.BLOCK_LEVEL:
            entries = json.loads(payload)
            with self._lock:
                self._rng.shuffle(entries)
            payload = json.dumps(entries)
        with self._lock:
            step = self._rng.randint(8, 40)
        for i in range(0, len(payload), step):
            self._nap()
            yield payload[i : i + step]


class CountingProvider:
    """Wraps a provider and counts issued sub-requests, thread-safely."""

    def __init__(self, inner=None) -> None:
        self._inner = inner or MockProvider()
        self.deterministic = getattr(self._inner, "deterministic", False)
        self._lock = threading.Lock()
        self.completions = 0
        self.streams = 0

    @property
    def total(self) -> int:
        with self._lock:
            return self.completions + self.streams

    def preflight(self, cfg) -> None:
        self._inner.preflight(cfg)

    def complete(self, prompt, cfg, cancelled) -> str:
        with self._lock:
            self.completions += 1
        return self._inner.complete(prompt, cfg, cancelled)

    def stream(self, prompt, cfg, cancelled):
        with self._lock:
            self.streams += 1
        yield from self._inner.stream(prompt, cfg, cancelled)


class StallingProvider:
    """Blocks every request until released; lets tests cancel mid-flight."""

    deterministic = False

    def __init__(self) -> None:
        self.release = threading.Event()
        self._mock = MockProvider()

    def preflight(self, cfg) -> None:
        return None

    def _wait(self, cancelled) -> None:
        while not self.release.is_set():
            if cancelled.is_set():
                raise ProviderRequestError("cancelled while stalled")
            time.sleep(0.001)

    def complete(self, prompt, cfg, cancelled) -> str:
        self._wait(cancelled)
        return self._mock.complete(prompt, cfg, cancelled)

    def stream(self, prompt, cfg, cancelled):
        self._wait(cancelled)
        yield from self._mock.stream(prompt, cfg, cancelled)


class FailingProvider:
    """Mock behaviour except for selected target lines, which error out."""

    deterministic = True

    def __init__(self, fail_lines: set[int] | None = None, fail_block: bool = False):
        self._fail_lines = fail_lines or set()
        self._fail_block = fail_block
        self._mock = MockProvider()

    def preflight(self, cfg) -> None:
        return None

    def complete(self, prompt, cfg, cancelled) -> str:
        if prompt.target_line in self._fail_lines:
            raise ProviderRequestError(f"scripted failure on line {prompt.target_line}")
        if prompt.kind is PromptKind.BLOCK_LEVEL and self._fail_block:
            raise ProviderRequestError("scripted block failure")
        return self._mock.complete(prompt, cfg, cancelled)

    def stream(self, prompt, cfg, cancelled):
        if prompt.kind is PromptKind.BLOCK_LEVEL and self._fail_block:
            raise ProviderRequestError("scripted block failure")
        yield from self._mock.stream(prompt, cfg, cancelled)


class ScriptedProvider:
    """Returns fixed payload text regardless of the prompt."""

    deterministic = True

    def __init__(self, expression_payload: str = "[]", block_payload: str = "[]"):
        self.expression_payload = expression_payload
        self.block_payload = block_payload

    def preflight(self, cfg) -> None:
        return None

    def complete(self, prompt, cfg, cancelled) -> str:
        if prompt.kind is PromptKind.EXPRESSION_LEVEL:
            return self.expression_payload
        return self.block_payload

    def stream(self, prompt, cfg, cancelled):
        yield self.complete(prompt, cfg, cancelled)
