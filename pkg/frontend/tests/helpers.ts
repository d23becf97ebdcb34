import fixture from "./fixtures/plotting_session.json";
import { ClientMessage, ServerMessage } from "../src/protocol";
import { PlaygroundApp, Sender } from "../src/app";
import { SCENARIOS } from "../src/fixtures";

export const PLOTTING = SCENARIOS[2];

export class FakeSender implements Sender {
  sent: ClientMessage[] = [];
  alive = true;

  send(msg: ClientMessage): boolean {
    if (!this.alive) return false;
    this.sent.push(msg);
    return true;
  }

  typesSent(): string[] {
    return this.sent.map((m) => m.type);
  }

  last(): ClientMessage {
    return this.sent[this.sent.length - 1];
  }
}

export function mountApp(sender: Sender): { app: PlaygroundApp; root: HTMLElement } {
  const root = document.createElement("main");
  document.body.replaceChildren(root);
  const app = new PlaygroundApp(root, sender);
  return { app, root };
}

/** The engine-recorded session, with ids rebound to the app's live suggestion. */
export function engineMessages(
  which: "messages" | "hoverLine3" | "unhover",
  suggestionId: string,
): ServerMessage[] {
  return (fixture[which] as ServerMessage[]).map((m) =>
    "suggestionId" in m ? { ...m, suggestionId } : m,
  );
}

export function overlayBoxes(root: HTMLElement, selector: string): HTMLElement[] {
  return Array.from(root.querySelectorAll(selector)) as HTMLElement[];
}

export function finalLayout(): ServerMessage {
  const layouts = (fixture.messages as ServerMessage[]).filter(
    (m) => m.type === "layout",
  );
  return layouts[layouts.length - 1];
}
