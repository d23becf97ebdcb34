"""Core domain types shared by every other module.

Columns everywhere count Unicode scalar values (plain Python string
indices), never bytes or UTF-16 code units. Clients that need a
different unit translate at their own boundary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

MAX_CONTEXT_LINES = 40

_SENTENCE_TERMINATORS = ".!?"


class EmptyExplanation(ValueError):
    """Raised when an explanation text normalizes to the empty string."""


class BlankLine(ValueError):
    """Raised when an operation needs a non-blank code line."""


class TooShort(ValueError):
    """Raised when a block-level operation gets fewer than two lines."""


class SuggestionKind(enum.Enum):
    SINGLE_LINE = "single_line"
    MULTI_LINE = "multi_line"


class ExplanationStatus(enum.Enum):
    PENDING = "pending"
    PARTIAL = "partial"
    COMPLETE = "complete"
    FAILED = "failed"


class ProviderKind(enum.Enum):
    MOCK = "mock"
    REMOTE = "remote"


@dataclass(frozen=True)
class Suggestion:
    """One ghost-text appearance: where it sits in a document and what it says.

    ``lines`` holds the suggested text split into lines with terminators
    stripped. ``preceding_context`` carries at most the 40 document lines
    above ``anchor_line``; callers with more context pass the last 40.
    """

    suggestion_id: str
    doc_id: str
    doc_content_hash: str
    anchor_line: int
    lines: tuple[str, ...]
    preceding_context: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "lines", tuple(self.lines))
        object.__setattr__(self, "preceding_context", tuple(self.preceding_context))
        if not self.lines:
            raise ValueError("suggestion must have at least one line")
        for ln in self.lines + self.preceding_context:
            if "\n" in ln or "\r" in ln:
                raise ValueError("suggestion lines must not contain line terminators")
        if self.anchor_line < 0:
            raise ValueError(f"anchor_line must be >= 0, got {self.anchor_line}")
        if len(self.preceding_context) > MAX_CONTEXT_LINES:
            raise ValueError(
                f"preceding_context is capped at {MAX_CONTEXT_LINES} lines,"
                f" got {len(self.preceding_context)}"
            )


@dataclass(frozen=True)
class Span:
    """Half-open column range on one suggestion line."""

    line: int
    col_start: int
    col_end: int

    def __post_init__(self) -> None:
        if self.line < 0:
            raise ValueError(f"line must be >= 0, got {self.line}")
        if not 0 <= self.col_start < self.col_end:
            raise ValueError(
                f"need 0 <= col_start < col_end, got [{self.col_start}, {self.col_end})"
            )

    def overlaps(self, other: "Span") -> bool:
        return (
            self.line == other.line
            and self.col_start < other.col_end
            and other.col_start < self.col_end
        )


@dataclass(frozen=True)
class ExpressionExplanation:
    """A short explanation bound to one expression's exact columns."""

    span: Span
    text: str
    ordinal: int

    def __post_init__(self) -> None:
        if normalize_explanation_text(self.text) != self.text:
            raise ValueError("explanation text must be normalized")
        if self.ordinal < 0:
            raise ValueError(f"ordinal must be >= 0, got {self.ordinal}")


@dataclass(frozen=True)
class BlockExplanation:
    """A short explanation bound to an inclusive range of suggestion lines."""

    start_line: int
    end_line: int
    text: str

    def __post_init__(self) -> None:
        if self.start_line < 0 or self.start_line > self.end_line:
            raise ValueError(
                f"need 0 <= start_line <= end_line, got [{self.start_line}, {self.end_line}]"
            )
        if normalize_explanation_text(self.text) != self.text:
            raise ValueError("explanation text must be normalized")


@dataclass(frozen=True)
class ExplanationSet:
    """The evolving per-suggestion collection of explanations.

    ``expressions_by_line`` has an entry for every line whose expression
    request settled successfully (the tuple may be empty). ``failures``
    records sub-requests that failed as ``(line, reason)`` pairs, with
    ``line is None`` marking the block request. ``blocks_validated_empty``
    distinguishes "the block request succeeded but nothing survived
    validation" from "blocks were never delivered".
    """

    suggestion_id: str
    status: ExplanationStatus = ExplanationStatus.PENDING
    expressions_by_line: Mapping[int, tuple[ExpressionExplanation, ...]] = field(
        default_factory=dict
    )
    blocks: tuple[BlockExplanation, ...] = ()
    blocks_validated_empty: bool = False
    failures: tuple[tuple[int | None, str], ...] = ()

    def with_expressions(
        self, line: int, items: Iterable[ExpressionExplanation]
    ) -> "ExplanationSet":
        by_line = dict(self.expressions_by_line)
        by_line[line] = tuple(items)
        return replace(self, expressions_by_line=by_line)

    def with_block(self, block: BlockExplanation) -> "ExplanationSet":
        blocks = tuple(sorted(self.blocks + (block,), key=lambda b: b.start_line))
        return replace(self, blocks=blocks)

    def with_failure(self, line: int | None, reason: str) -> "ExplanationSet":
        return replace(self, failures=self.failures + ((line, reason),))


def normalize_explanation_text(raw: str) -> str:
    """Collapse whitespace and truncate after the second sentence.

    A sentence terminator is ``.``, ``!`` or ``?`` followed by whitespace
    or the end of the text. Abbreviations get no special treatment; for
    the short generated texts this handles, that trade-off is acceptable.
    """
    collapsed = " ".join(raw.split())
    seen = 0
    for i, ch in enumerate(collapsed):
        if ch in _SENTENCE_TERMINATORS and (
            i + 1 == len(collapsed) or collapsed[i + 1] == " "
        ):
            seen += 1
            if seen == 2:
                collapsed = collapsed[: i + 1]
                break
    if not collapsed:
        raise EmptyExplanation("explanation text is empty after normalization")
    return collapsed


def suggestion_kind(s: Suggestion) -> SuggestionKind:
    """Single-line suggestions get expression labels; longer ones get blocks too."""
    if len(s.lines) == 1:
        return SuggestionKind.SINGLE_LINE
    return SuggestionKind.MULTI_LINE


def consistency_errors(s: Suggestion, es: ExplanationSet) -> list[str]:
    """Every structural invariant of an ExplanationSet, checked in one pass.

    Returns a list of problem descriptions; an empty list means consistent.
    """
    problems: list[str] = []
    if es.suggestion_id != s.suggestion_id:
        problems.append(
            f"set belongs to {es.suggestion_id!r}, suggestion is {s.suggestion_id!r}"
        )
    for line, items in sorted(es.expressions_by_line.items()):
        if not 0 <= line < len(s.lines):
            problems.append(f"line {line} outside suggestion of {len(s.lines)} lines")
            continue
        text = s.lines[line]
        prev_end = -1
        for i, item in enumerate(items):
            sp = item.span
            if sp.line != line:
                problems.append(f"line {line}: item {i} carries span.line {sp.line}")
            if sp.col_end > len(text):
                problems.append(
                    f"line {line}: span [{sp.col_start}, {sp.col_end}) exceeds"
                    f" line length {len(text)}"
                )
            if sp.col_start < prev_end:
                problems.append(
                    f"line {line}: span [{sp.col_start}, {sp.col_end}) overlaps"
                    " its left sibling"
                )
            if item.ordinal != i:
                problems.append(
                    f"line {line}: item {i} has ordinal {item.ordinal}"
                )
            prev_end = max(prev_end, sp.col_end)
    prev_block_end = -1
    for b in es.blocks:
        if b.end_line >= len(s.lines):
            problems.append(
                f"block [{b.start_line}, {b.end_line}] exceeds {len(s.lines)} lines"
            )
        if b.start_line <= prev_block_end:
            problems.append(
                f"block [{b.start_line}, {b.end_line}] overlaps or precedes"
                " the block before it"
            )
        prev_block_end = b.end_line
    if es.status is ExplanationStatus.COMPLETE:
        requested = set(range(len(s.lines))) - {
            line for line, _ in es.failures if line is not None
        }
        missing = sorted(requested - set(es.expressions_by_line))
        if missing:
            problems.append(f"status is Complete but lines {missing} have no entry")
        if (
            suggestion_kind(s) is SuggestionKind.MULTI_LINE
            and not es.blocks
            and not es.blocks_validated_empty
        ):
            problems.append(
                "status is Complete for a multi-line suggestion but blocks are"
                " neither present nor recorded empty-after-validation"
            )
    return problems


def check_consistency(s: Suggestion, es: ExplanationSet) -> bool:
    """Predicate form of :func:`consistency_errors`."""
    return not consistency_errors(s, es)


@dataclass(frozen=True)
class ProviderConfig:
    """How explanations are produced: the deterministic mock or a remote model."""

    provider_kind: ProviderKind = ProviderKind.MOCK
    model_id: str = "gpt-3.5-turbo-instruct"
    temperature: float = 0.5
    max_tokens: int = 1000
    stream: bool = True
    endpoint_url: str = ""
    api_key_env_var: str = "CODEGLOSS_API_KEY"

    def __post_init__(self) -> None:
        if not 0 <= self.temperature <= 2:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {self.max_tokens}")


def make_suggestion(
    suggestion_id: str,
    doc_id: str,
    doc_content_hash: str,
    anchor_line: int,
    lines: Sequence[str],
    preceding_context: Sequence[str] = (),
) -> Suggestion:
    """Build a Suggestion, keeping only the last 40 context lines."""
    return Suggestion(
        suggestion_id=suggestion_id,
        doc_id=doc_id,
        doc_content_hash=doc_content_hash,
        anchor_line=anchor_line,
        lines=tuple(lines),
        preceding_context=tuple(preceding_context)[-MAX_CONTEXT_LINES:],
    )
