/** Browser entry point: connect, build the app, wire the toolbar. */

import { Connection, ConnectionState } from "./connection.js";
import { PlaygroundApp } from "./app.js";
import { SCENARIOS } from "./fixtures.js";

const VIEWPORT_COLS = 120;

function main(): void {
  const root = document.getElementById("app");
  const toolbar = document.getElementById("toolbar");
  const connEl = document.getElementById("connection");
  const banner = document.getElementById("banner");
  if (!root || !toolbar || !connEl || !banner) throw new Error("missing page shell");

  const url =
    new URLSearchParams(location.search).get("server") ?? "ws://127.0.0.1:8765";

  let app: PlaygroundApp | null = null;
  const connection = new Connection({
    url,
    viewportCols: VIEWPORT_COLS,
    onMessage: (msg) => app?.handleServerMessage(msg),
    onState: (state: ConnectionState) => {
      connEl.textContent = state;
      connEl.dataset.state = state;
      banner.classList.toggle("hidden", state !== "reconnecting");
    },
  });
  app = new PlaygroundApp(root, connection);
  app.setBuffer(SCENARIOS[0].bufferLines);

  const select = document.createElement("select");
  for (const [i, scenario] of SCENARIOS.entries()) {
    const opt = document.createElement("option");
    opt.value = String(i);
    opt.textContent = scenario.name;
    select.appendChild(opt);
  }
  const showBtn = document.createElement("button");
  showBtn.textContent = "Trigger suggestion";
  showBtn.addEventListener("click", () =>
    app?.showScenario(SCENARIOS[Number(select.value)]),
  );

  const explainBtn = document.createElement("button");
  explainBtn.textContent = "Explain file";
  explainBtn.addEventListener("click", () => app?.explainFile());

  const paste = document.createElement("textarea");
  paste.placeholder = "…or paste code here";
  const pasteBtn = document.createElement("button");
  pasteBtn.textContent = "Show pasted as suggestion";
  pasteBtn.addEventListener("click", () => app?.showPasted(paste.value));

  toolbar.append(select, showBtn, explainBtn, paste, pasteBtn);
}

main();
