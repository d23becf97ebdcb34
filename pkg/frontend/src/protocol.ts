/** Wire message shapes for the codegloss session protocol (camelCase JSON lines). */

export interface SpanPayload {
  line: number;
  colStart: number;
  colEnd: number;
}

export interface ExpressionItem {
  span: SpanPayload;
  text: string;
  ordinal: number;
}

export interface Leader {
  fromCol: number;
  toCol: number;
}

export interface LabelBox {
  id: string;
  kind: string;
  row: number;
  col: number;
  widthCols: number;
  heightRows: number;
  leader: Leader | null;
  colorIndex: number;
}

export interface MarginBox {
  blockRef: number;
  anchorCol: number;
  rowStart: number;
  rowEnd: number;
  fade: boolean;
  leftBorder: boolean;
}

export interface LayoutMessage {
  type: "layout";
  suggestionId: string;
  labels: LabelBox[];
  margins: MarginBox[];
}

export interface ExpressionsMessage {
  type: "expressions";
  suggestionId: string;
  line: number;
  items: ExpressionItem[];
}

export interface BlockMessage {
  type: "block";
  suggestionId: string;
  startLine: number;
  endLine: number;
  text: string;
}

export interface StatusMessage {
  type: "status";
  state: string;
  suggestionId?: string;
  docId?: string;
  reason?: string;
}

export type ServerMessage =
  | { type: "ready"; protocolVersion: number }
  | ExpressionsMessage
  | BlockMessage
  | LayoutMessage
  | StatusMessage
  | { type: "error"; code: string; message: string };

export interface SuggestionShown {
  type: "suggestion_shown";
  suggestionId: string;
  docId: string;
  docContentHash: string;
  anchorLine: number;
  lines: string[];
  precedingContext?: string[];
}

export type ClientMessage =
  | { type: "hello"; clientName: string }
  | { type: "configure"; grid: { viewportCols: number } }
  | SuggestionShown
  | { type: "suggestion_accepted"; suggestionId: string }
  | { type: "suggestion_dismissed"; suggestionId: string }
  | { type: "hover"; line: number }
  | { type: "unhover" }
  | { type: "explain_file"; docId: string; lines: string[]; granularity?: string }
  | { type: "cancel_file"; docId: string };

export function parseServerMessage(data: string): ServerMessage | null {
  try {
    const msg = JSON.parse(data);
    if (msg && typeof msg.type === "string") return msg as ServerMessage;
  } catch {
    // tolerate garbage frames; the server is authoritative
  }
  return null;
}
