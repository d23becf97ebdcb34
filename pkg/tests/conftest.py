import pytest

from codegloss.model import make_suggestion

CANNY_LINE = "cv.Canny(img, 100, 200)"
GAUSSIAN_LINE = "cv.GaussianBlur(img, (5, 5), 0)"

# 16-line plotting suggestion in the shape of the walk-through scenario:
# two five-line plotting sections separated by blank lines.
PLOTTING_LINES = [
    "def plot_extremes(df):",
    "    fig, axes = plt.subplots(2, 1, figsize=(10, 8))",
    "",
    '    hottest = df.loc[df["temp"].idxmax(), "city"]',
    '    temp = df[df["city"] == hottest]',
    '    axes[0].plot(temp["date"], temp["temp"], color="tomato")',
    '    axes[0].set_title(f"Temperature in {hottest}")',
    '    axes[0].yaxis.set_major_formatter(FormatStrFormatter("%0.1f"))',
    "",
    '    wettest = df.loc[df["rain"].idxmax(), "city"]',
    '    rain = df[df["city"] == wettest]',
    '    axes[1].bar(rain["date"], rain["rain"], color="steelblue")',
    '    axes[1].set_title(f"Rainfall in {wettest}")',
    '    axes[1].yaxis.set_major_locator(MaxNLocator(integer=True))',
    "",
    "    plt.tight_layout()",
]

THREE_LINES = [
    "img = cv.imread(path)",
    "gray = cv.cvtColor(img, cv.COLOR_BGR2GRAY)",
    "edges = cv.Canny(gray, 100, 200)",
]


def suggestion_of(lines, suggestion_id="s-1", anchor_line=0, doc_id="doc-1"):
    if isinstance(lines, str):
        lines = [lines]
    return make_suggestion(
        suggestion_id=suggestion_id,
        doc_id=doc_id,
        doc_content_hash="f" * 64,
        anchor_line=anchor_line,
        lines=lines,
    )


@pytest.fixture
def canny_suggestion():
    return suggestion_of(CANNY_LINE)


@pytest.fixture
def three_line_suggestion():
    return suggestion_of(THREE_LINES)


@pytest.fixture
def plotting_suggestion():
    return suggestion_of(PLOTTING_LINES)
