"""Prompt construction for the two request kinds.

Rendering is a pure function of the inputs, so identical inputs produce
byte-identical prompts. Code is embedded in fenced blocks whose fence is
extended past any backtick run in the content; the target code is always
the last fenced block in the prompt, which is also how the mock provider
locates it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .model import BlankLine, TooShort


class PromptKind(enum.Enum):
    EXPRESSION_LEVEL = "expression_level"
    BLOCK_LEVEL = "block_level"


@dataclass(frozen=True)
class Prompt:
    kind: PromptKind
    text: str
    target_line: int | None = None


_EXPRESSION_INSTRUCTIONS = """\
You split one line of code into its meaningful expressions and write a brief
explanation of each.

Rules:
- Work strictly left to right across the line.
- Keep every explanation short: one or two sentences.
- Copy each "segment" verbatim from the line so it can be located exactly.
- Respond with only a JSON array of objects, one per expression, shaped
  {"segment": "<exact source text>", "explanation": "<brief explanation>"}.

Example line:

```
totals = df.groupby("city").sum()
```

Example response:

[{"segment": "totals", "explanation": "Variable that receives the result."},
 {"segment": "df.groupby(\\"city\\")", "explanation": "Groups the rows of df by the city column."},
 {"segment": ".sum()", "explanation": "Adds up the numeric columns of each group."}]
"""

_BLOCK_INSTRUCTIONS = """\
You split a multi-line code suggestion into contiguous steps and write a brief
explanation of each step.

Rules:
- Each step covers one or more consecutive lines; steps must not overlap.
- Refer to lines by the 0-based numbers shown; list steps in ascending order.
- Keep every explanation short: one or two sentences.
- Respond with only a JSON array of objects, one per step, shaped
  {"startLine": <int>, "endLine": <int>, "explanation": "<brief explanation>"}.

Example suggestion:

```
0: fig, ax = plt.subplots()
1: ax.plot(xs, ys)
2: ax.set_title("Trend")
3: plt.show()
```

Example response:

[{"startLine": 0, "endLine": 0, "explanation": "Create a figure with one axes."},
 {"startLine": 1, "endLine": 2, "explanation": "Draw the series and title the plot."},
 {"startLine": 3, "endLine": 3, "explanation": "Display the finished figure."}]
"""


def _fence(content: str) -> str:
    longest = 0
    run = 0
    for ch in content:
        run = run + 1 if ch == "`" else 0
        longest = max(longest, run)
    return "`" * max(3, longest + 1)


def _fenced(content: str) -> str:
    fence = _fence(content)
    return f"{fence}\n{content}\n{fence}"


def _context_section(context: Sequence[str]) -> str:
    if not context:
        return ""
    return "Context (lines above the suggestion):\n\n" + _fenced("\n".join(context)) + "\n\n"


def build_expression_prompt(
    line: str, context: Sequence[str], *, target_line: int | None = None
) -> Prompt:
    """Prompt asking for the line's expressions as a JSON array.

    Contains one worked example of the expected output, then the context,
    then the target line as the final fenced block.
    """
    if not line.strip():
        raise BlankLine("cannot request expression explanations for a blank line")
    text = (
        _EXPRESSION_INSTRUCTIONS
        + "\n"
        + _context_section(context)
        + "Split and explain this line:\n\n"
        + _fenced(line)
        + "\n"
    )
    return Prompt(PromptKind.EXPRESSION_LEVEL, text, target_line)


def build_block_prompt(lines: Sequence[str], context: Sequence[str]) -> Prompt:
    """Prompt asking for contiguous multi-line steps as a JSON array.

    The suggestion is embedded with 0-based line numbers as the final
    fenced block.
    """
    if len(lines) < 2:
        raise TooShort("block-level explanations need at least two lines")
    numbered = "\n".join(f"{i}: {ln}" for i, ln in enumerate(lines))
    text = (
        _BLOCK_INSTRUCTIONS
        + "\n"
        + _context_section(context)
        + "Split and explain this suggestion:\n\n"
        + _fenced(numbered)
        + "\n"
    )
    return Prompt(PromptKind.BLOCK_LEVEL, text)
