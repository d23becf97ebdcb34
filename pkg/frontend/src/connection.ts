/** Reconnecting websocket client for the session protocol.
 *
 * Reconnects with exponential backoff and resends hello + configure on
 * every (re)open so the server always knows the pane's viewport width.
 */

import { ClientMessage, ServerMessage, parseServerMessage } from "./protocol.js";

export type ConnectionState = "connecting" | "ready" | "reconnecting" | "closed";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  readyState?: number;
}

export interface ConnectionOptions {
  url: string;
  viewportCols: number;
  onMessage: (msg: ServerMessage) => void;
  onState: (state: ConnectionState) => void;
  /** injectable for tests; defaults to the browser WebSocket */
  socketFactory?: (url: string) => SocketLike;
  maxBackoffMs?: number;
}

const OPEN = 1;

export class Connection {
  private socket: SocketLike | null = null;
  private backoff = 500;
  private stopped = false;
  private readonly opts: ConnectionOptions;

  constructor(opts: ConnectionOptions) {
    this.opts = opts;
    this.connect("connecting");
  }

  private connect(state: ConnectionState): void {
    if (this.stopped) return;
    this.opts.onState(state);
    const factory =
      this.opts.socketFactory ?? ((url: string) => new WebSocket(url) as SocketLike);
    const socket = factory(this.opts.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoff = 500;
      this.send({ type: "hello", clientName: "playground" });
      this.send({
        type: "configure",
        grid: { viewportCols: this.opts.viewportCols },
      });
    };
    socket.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg === null) return;
      if (msg.type === "ready") this.opts.onState("ready");
      this.opts.onMessage(msg);
    };
    socket.onerror = () => {
      /* onclose follows and schedules the retry */
    };
    socket.onclose = () => {
      if (this.stopped) return;
      this.opts.onState("reconnecting");
      this.backoff = Math.min(this.backoff * 2, this.opts.maxBackoffMs ?? 15_000);
      setTimeout(() => this.connect("reconnecting"), this.backoff);
    };
  }

  send(msg: ClientMessage): boolean {
    const socket = this.socket;
    if (!socket || (socket.readyState !== undefined && socket.readyState !== OPEN)) {
      return false;
    }
    try {
      socket.send(JSON.stringify(msg));
      return true;
    } catch {
      return false;
    }
  }

  close(): void {
    this.stopped = true;
    this.opts.onState("closed");
    this.socket?.close();
  }
}
