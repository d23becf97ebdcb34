/** DOM projection of a layout message onto the monospace grid.
 *
 * One grid cell is 1ch wide and ROW_EM ems tall; every box is an
 * absolutely positioned div whose style comes straight from the plan's
 * (row, col, width, height). Six hues cycle by colorIndex, shared by
 * label borders and expression underlines.
 */

import { LabelBox, LayoutMessage, MarginBox } from "./protocol.js";
import { ViewModel } from "./viewmodel.js";

export const ROW_EM = 1.5;
export const PALETTE = [
  "#e4572e",
  "#17bebb",
  "#ffc914",
  "#76b041",
  "#9b5de5",
  "#f15bb5",
];

function place(
  el: HTMLElement,
  row: number,
  col: number,
  widthCols: number,
  heightRows: number,
): void {
  el.style.position = "absolute";
  el.style.left = `${col}ch`;
  el.style.top = `${row * ROW_EM}em`;
  el.style.width = `${widthCols}ch`;
  el.style.height = `${heightRows * ROW_EM}em`;
  el.dataset.row = String(row);
  el.dataset.col = String(col);
  el.dataset.width = String(widthCols);
  el.dataset.height = String(heightRows);
}

function labelText(vm: ViewModel, box: LabelBox): string {
  // label ids are "expr:<line>:<ordinal>"
  const [, lineStr, ordinalStr] = box.id.split(":");
  const items = vm.expressionsByLine.get(Number(lineStr)) ?? [];
  const item = items.find((i) => i.ordinal === Number(ordinalStr));
  return item ? item.text : "";
}

function renderLabel(vm: ViewModel, box: LabelBox): HTMLElement[] {
  const el = document.createElement("div");
  el.className = "gloss-label";
  el.dataset.labelId = box.id;
  el.dataset.colorIndex = String(box.colorIndex);
  place(el, box.row, box.col, box.widthCols, box.heightRows);
  el.style.borderColor = PALETTE[box.colorIndex % PALETTE.length];
  el.textContent = labelText(vm, box);
  const out = [el];
  if (box.leader !== null) {
    const leader = document.createElement("div");
    leader.className = "gloss-leader";
    const from = Math.min(box.leader.fromCol, box.leader.toCol);
    const to = Math.max(box.leader.fromCol, box.leader.toCol);
    place(leader, box.row, from, Math.max(to - from, 1), 1);
    leader.dataset.for = box.id;
    out.push(leader);
  }
  return out;
}

function renderMargin(
  vm: ViewModel,
  box: MarginBox,
  viewportCols: number,
): HTMLElement {
  const el = document.createElement("div");
  el.className = "gloss-margin" + (box.fade ? " fade" : "");
  el.dataset.blockRef = String(box.blockRef);
  // margin text wraps at the remaining viewport width, as the engine documents
  const width = Math.max(viewportCols - box.anchorCol, 8);
  place(el, box.rowStart, box.anchorCol, width, box.rowEnd - box.rowStart + 1);
  if (box.leftBorder) el.classList.add("left-border");
  const block = vm.blocks[box.blockRef];
  el.textContent = block ? block.text : "";
  return el;
}

/** Replace the overlay layer's contents with the plan's boxes. */
export function renderOverlays(
  vm: ViewModel,
  layer: HTMLElement,
  viewportCols = 120,
): void {
  layer.replaceChildren();
  const plan: LayoutMessage | null = vm.plan;
  if (plan === null) return;
  for (const margin of plan.margins) {
    layer.appendChild(renderMargin(vm, margin, viewportCols));
  }
  for (const label of plan.labels) {
    for (const el of renderLabel(vm, label)) layer.appendChild(el);
  }
}

/** Underline one expression's span on its code row (label hover affordance). */
export function renderUnderline(
  vm: ViewModel,
  layer: HTMLElement,
  labelId: string,
  anchorLine: number,
): void {
  clearUnderline(layer);
  const [, lineStr, ordinalStr] = labelId.split(":");
  const items = vm.expressionsByLine.get(Number(lineStr)) ?? [];
  const item = items.find((i) => i.ordinal === Number(ordinalStr));
  if (!item) return;
  const el = document.createElement("div");
  el.className = "gloss-underline";
  place(
    el,
    anchorLine + item.span.line,
    item.span.colStart,
    item.span.colEnd - item.span.colStart,
    1,
  );
  el.style.borderBottomColor = PALETTE[item.ordinal % PALETTE.length];
  layer.appendChild(el);
}

export function clearUnderline(layer: HTMLElement): void {
  for (const el of Array.from(layer.querySelectorAll(".gloss-underline"))) {
    el.remove();
  }
}
