"""codegloss: anchored expression- and block-level explanations for code."""

from .anchoring import (
    RawSegment,
    Unparseable,
    ValidationReport,
    anchor_segments,
    parse_block_payload,
    parse_expression_payload,
    repair_blocks,
    validate_expressions,
)
from .layout import (
    GridMetrics,
    LabelBox,
    LayoutPlan,
    MarginBox,
    StaleSet,
    full_layout,
    layout_blocks,
    layout_expressions,
    measure_label,
)
from .model import (
    BlankLine,
    BlockExplanation,
    EmptyExplanation,
    ExplanationSet,
    ExplanationStatus,
    ExpressionExplanation,
    ProviderConfig,
    ProviderKind,
    Span,
    Suggestion,
    SuggestionKind,
    TooShort,
    check_consistency,
    consistency_errors,
    make_suggestion,
    normalize_explanation_text,
    suggestion_kind,
)
from .pipeline import (
    AllDone,
    BlockReady,
    ExplanationPipeline,
    ExplanationStream,
    ExpressionsReady,
    RequestFailed,
    collect,
)
from .prompts import Prompt, PromptKind, build_block_prompt, build_expression_prompt
from .providers import (
    MockProvider,
    ProviderUnavailable,
    RemoteProvider,
    mock_block_segments,
    mock_segment_line,
    provider_for,
)
from .session import Session
from .splitting import Segment, SegmentKind, split_top_level

__version__ = "0.1.0"
