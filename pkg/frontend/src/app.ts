/** Playground wiring: code pane, ghost text, hover loop, dismissal keys.
 *
 * All geometry comes from the server's layout messages; this file only
 * routes DOM events to protocol messages and projects state to DOM.
 */

import { ClientMessage, ServerMessage } from "./protocol.js";
import {
  applyMessage,
  clearExplanations,
  emptyViewModel,
  ViewModel,
} from "./viewmodel.js";
import {
  clearUnderline,
  renderOverlays,
  renderUnderline,
  ROW_EM,
} from "./overlay.js";
import { nextSuggestionId, pseudoHash, Scenario } from "./fixtures.js";

export interface Sender {
  send(msg: ClientMessage): boolean;
}

export class PlaygroundApp {
  readonly vm: ViewModel;
  private readonly sender: Sender;
  private readonly docId: string;
  private readonly codeLayer: HTMLElement;
  private readonly overlayLayer: HTMLElement;
  private readonly statusEl: HTMLElement;
  private wholeFile = false;
  private hovered: number | null = null;

  constructor(root: HTMLElement, sender: Sender, docId = "playground.py") {
    this.sender = sender;
    this.docId = docId;
    this.vm = emptyViewModel();
    root.innerHTML = `
      <div class="pane-wrap">
        <div class="pane">
          <div class="code-layer"></div>
          <div class="overlay-layer"></div>
        </div>
        <div class="status-line" data-status="idle"></div>
      </div>`;
    this.codeLayer = root.querySelector(".code-layer") as HTMLElement;
    this.overlayLayer = root.querySelector(".overlay-layer") as HTMLElement;
    this.statusEl = root.querySelector(".status-line") as HTMLElement;
    this.attachEvents(root);
    this.renderCode();
  }

  // -- server messages ------------------------------------------------------

  handleServerMessage(msg: ServerMessage): void {
    applyMessage(this.vm, msg);
    if (msg.type === "status") {
      this.statusEl.dataset.status = msg.state;
      this.statusEl.textContent = msg.state;
    }
    this.render();
  }

  // -- user actions -----------------------------------------------------------

  setBuffer(lines: string[]): void {
    this.vm.bufferLines = [...lines];
    this.renderCode();
  }

  showScenario(scenario: Scenario): void {
    this.setBuffer(scenario.bufferLines);
    this.showSuggestion(scenario.anchorLine, scenario.suggestionLines);
  }

  showPasted(text: string): void {
    const lines = text.split("\n").filter((l, i, all) => i < all.length - 1 || l !== "");
    if (!lines.length) return;
    this.showSuggestion(this.vm.bufferLines.length, lines);
  }

  showSuggestion(anchorLine: number, lines: string[]): void {
    this.wholeFile = false;
    clearExplanations(this.vm);
    const suggestionId = nextSuggestionId();
    this.vm.ghost = { suggestionId, anchorLine, lines };
    this.vm.activeId = suggestionId;
    this.sender.send({
      type: "suggestion_shown",
      suggestionId,
      docId: this.docId,
      docContentHash: pseudoHash(this.vm.bufferLines),
      anchorLine,
      lines,
      precedingContext: this.vm.bufferLines.slice(0, anchorLine).slice(-40),
    });
    this.renderCode();
    this.render();
  }

  accept(): void {
    const ghost = this.vm.ghost;
    if (!ghost) return;
    this.sender.send({
      type: "suggestion_accepted",
      suggestionId: ghost.suggestionId,
    });
    this.vm.bufferLines = [
      ...this.vm.bufferLines.slice(0, ghost.anchorLine),
      ...ghost.lines,
      ...this.vm.bufferLines.slice(ghost.anchorLine),
    ];
    this.vm.ghost = null;
    clearExplanations(this.vm);
    this.renderCode();
    this.render();
  }

  dismiss(): void {
    const ghost = this.vm.ghost;
    if (!ghost) return;
    this.sender.send({
      type: "suggestion_dismissed",
      suggestionId: ghost.suggestionId,
    });
    this.vm.ghost = null;
    clearExplanations(this.vm);
    this.renderCode();
    this.render();
  }

  explainFile(): void {
    if (this.vm.ghost) this.dismiss();
    this.wholeFile = true;
    clearExplanations(this.vm);
    this.sender.send({
      type: "explain_file",
      docId: this.docId,
      lines: [...this.vm.bufferLines],
    });
    this.render();
  }

  hoverLine(line: number | null): void {
    if (line === this.hovered) return;
    this.hovered = line;
    if (line === null) {
      this.sender.send({ type: "unhover" });
    } else {
      this.sender.send({ type: "hover", line });
    }
  }

  // -- rendering ------------------------------------------------------------------

  private renderCode(): void {
    this.codeLayer.replaceChildren();
    const ghost = this.vm.ghost;
    const rows: Array<{ text: string; ghostLine: number | null; docLine: number }> = [];
    const buffer = this.vm.bufferLines;
    const anchor = ghost ? ghost.anchorLine : buffer.length;
    for (let i = 0; i < Math.min(anchor, buffer.length); i++) {
      rows.push({ text: buffer[i], ghostLine: null, docLine: i });
    }
    if (ghost) {
      ghost.lines.forEach((text, i) =>
        rows.push({ text, ghostLine: i, docLine: anchor + i }),
      );
    }
    for (let i = anchor; i < buffer.length; i++) {
      rows.push({ text: buffer[i], ghostLine: null, docLine: i });
    }
    for (const row of rows) {
      const el = document.createElement("div");
      el.className = "code-line" + (row.ghostLine !== null ? " ghost" : "");
      el.style.height = `${ROW_EM}em`;
      el.textContent = row.text || " ";
      if (row.ghostLine !== null) el.dataset.suggestionLine = String(row.ghostLine);
      el.dataset.docLine = String(row.docLine);
      this.codeLayer.appendChild(el);
    }
  }

  private render(): void {
    renderOverlays(this.vm, this.overlayLayer);
  }

  // -- events ---------------------------------------------------------------------

  private attachEvents(root: HTMLElement): void {
    root.addEventListener("keydown", (ev: Event) => {
      if ((ev as KeyboardEvent).key === "Tab" && this.vm.ghost) {
        ev.preventDefault();
        this.accept();
      }
    });
    root.addEventListener("mouseover", (ev: Event) => {
      const target = ev.target as HTMLElement;
      const line = target.closest?.(".code-line") as HTMLElement | null;
      if (line) {
        if (this.vm.ghost && line.dataset.suggestionLine !== undefined) {
          this.hoverLine(Number(line.dataset.suggestionLine));
        } else if (this.vm.ghost) {
          this.hoverLine(null);
        } else if (this.wholeFile && line.dataset.docLine !== undefined) {
          this.hoverLine(Number(line.dataset.docLine));
        }
      }
      const label = target.closest?.(".gloss-label") as HTMLElement | null;
      if (label?.dataset.labelId) {
        label.classList.add("highlight");
        const anchor = this.vm.ghost ? this.vm.ghost.anchorLine : 0;
        renderUnderline(this.vm, this.overlayLayer, label.dataset.labelId, anchor);
      }
    });
    root.addEventListener("mouseout", (ev: Event) => {
      const label = (ev.target as HTMLElement).closest?.(".gloss-label") as
        | HTMLElement
        | null;
      if (label) {
        label.classList.remove("highlight");
        clearUnderline(this.overlayLayer);
      }
    });
    root.addEventListener("click", (ev: Event) => {
      if (!this.vm.ghost) return;
      const target = ev.target as HTMLElement;
      const insideGhost = target.closest?.(".code-line.ghost");
      const insideOverlay = target.closest?.(".overlay-layer");
      if (!insideGhost && !insideOverlay) this.dismiss();
    });
  }
}
