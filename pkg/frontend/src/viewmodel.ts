/** Client-side state: a pure fold over server messages.
 *
 * The rendered overlays are a projection of `plan`, the last layout
 * message; the client never computes geometry of its own. Expression
 * items are kept only so hovering a label can underline its source span.
 */

import {
  BlockMessage,
  ExpressionItem,
  LayoutMessage,
  ServerMessage,
} from "./protocol.js";

export interface GhostSuggestion {
  suggestionId: string;
  anchorLine: number;
  lines: string[];
}

export interface ViewModel {
  bufferLines: string[];
  ghost: GhostSuggestion | null;
  plan: LayoutMessage | null;
  expressionsByLine: Map<number, ExpressionItem[]>;
  blocks: BlockMessage[];
  statusState: string;
  /** id of the suggestion (or whole-file run) the messages concern */
  activeId: string | null;
}

export function emptyViewModel(bufferLines: string[] = []): ViewModel {
  return {
    bufferLines,
    ghost: null,
    plan: null,
    expressionsByLine: new Map(),
    blocks: [],
    statusState: "idle",
    activeId: null,
  };
}

export function clearExplanations(vm: ViewModel): void {
  vm.plan = null;
  vm.expressionsByLine = new Map();
  vm.blocks = [];
  vm.activeId = null;
}

/** Apply one server message in arrival order. */
export function applyMessage(vm: ViewModel, msg: ServerMessage): void {
  switch (msg.type) {
    case "expressions":
      if (vm.activeId !== null && msg.suggestionId !== vm.activeId) return;
      vm.activeId = msg.suggestionId;
      vm.expressionsByLine.set(msg.line, msg.items);
      break;
    case "block":
      if (vm.activeId !== null && msg.suggestionId !== vm.activeId) return;
      vm.activeId = msg.suggestionId;
      vm.blocks.push(msg);
      break;
    case "layout":
      if (vm.activeId !== null && msg.suggestionId !== vm.activeId) return;
      vm.activeId = msg.suggestionId;
      vm.plan = msg;
      break;
    case "status":
      vm.statusState = msg.state;
      if (msg.state === "idle" && msg.suggestionId === vm.activeId) {
        clearExplanations(vm);
      }
      if (msg.state === "pending" && msg.suggestionId !== vm.activeId) {
        clearExplanations(vm);
        vm.activeId = msg.suggestionId ?? null;
      }
      break;
    default:
      break;
  }
}
