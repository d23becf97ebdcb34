/** Bundled ghost-text scenarios for the playground. */

export interface Scenario {
  name: string;
  bufferLines: string[];
  anchorLine: number;
  suggestionLines: string[];
}

export const SCENARIOS: Scenario[] = [
  {
    name: "Edge detection (single line)",
    bufferLines: ["import cv2 as cv", "", "def outline(img):"],
    anchorLine: 3,
    suggestionLines: ["    edges = cv.Canny(img, 100, 200)"],
  },
  {
    name: "Blur then merge (three lines)",
    bufferLines: ["import cv2 as cv", "", "def soften(img):"],
    anchorLine: 3,
    suggestionLines: [
      "    blur = cv.GaussianBlur(img, (5, 5), 0)",
      "    gray = cv.cvtColor(blur, cv.COLOR_BGR2GRAY)",
      "    return gray",
    ],
  },
  {
    name: "Plot extremes (16 lines)",
    bufferLines: ["import pandas as pd", "import matplotlib.pyplot as plt", ""],
    anchorLine: 3,
    suggestionLines: [
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
    ],
  },
];

let counter = 0;

export function nextSuggestionId(): string {
  counter += 1;
  return `play-${counter}`;
}

/** Stable stand-in for a real buffer hash; the server only uses it as a key. */
export function pseudoHash(lines: string[]): string {
  let h = 2166136261;
  for (const ch of lines.join("\n")) {
    h = Math.imul(h ^ ch.charCodeAt(0), 16777619) >>> 0;
  }
  return h.toString(16).padStart(8, "0").repeat(8);
}
