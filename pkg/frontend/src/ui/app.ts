// Demonstration-collection UI.
//
// All truth comes from server payloads: the buttons are exactly the
// server's legal actions, the checklist is the server's goal bitmap, and
// the map is the server's raster. While a request is in flight the whole
// view locks, and every action carries the step it was rendered for, so a
// stale view can never submit (the guard survives devtools-forced clicks:
// the server's failure answer is displayed and the state re-synced).

import type {
  ActResponse, DiscreteAction, NearbyRecord, ObservationPayload, Raster,
  SessionResponse,
} from "./types.js";

const CELL_BLOCK = 4; // raster pixels per world cell
const PALETTE = [
  "#222", "#7f8c8d", "#f39c12", "#bdc3c7", "#d35400", "#c0392b", "#8e44ad",
  "#3498db", "#ecf0f1", "#a0522d", "#2c3e50", "#16a085",
];

export function actionKey(action: DiscreteAction): string {
  return action.type === "turn" ? "turn" : `${action.type}:${action.target}`;
}

export function actionLabel(action: DiscreteAction, nearby: NearbyRecord[]): string {
  if (action.type === "turn") return "turn";
  const rec = nearby.find((n) => n.id === action.target);
  const name = rec ? `${rec.cls} #${action.target}` : `#${action.target}`;
  return `${action.type.replace("_", " ")} ${name}`;
}

export interface AppHooks {
  onUpdate?: () => void;
}

export class DemoApp {
  private doc: Document;
  private base: string;
  private fetcher: typeof fetch;
  sid: string | null = null;
  payload: ObservationPayload | null = null;
  legal: DiscreteAction[] = [];
  busy = false;
  viewStep = -1; // the step this view was rendered for (stale guard)
  recording = false;
  lastError: string | null = null;
  private hooks: AppHooks;

  constructor(doc: Document, baseUrl: string, fetcher?: typeof fetch, hooks: AppHooks = {}) {
    this.doc = doc;
    this.base = baseUrl.replace(/\/$/, "");
    this.fetcher = fetcher ?? fetch.bind(globalThis);
    this.hooks = hooks;
  }

  private el<T extends HTMLElement>(id: string): T {
    const found = this.doc.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  bind(): void {
    this.el<HTMLButtonElement>("start").addEventListener("click", () => {
      const task = this.el<HTMLSelectElement>("task").value;
      const scene = this.el<HTMLSelectElement>("scene").value;
      const seed = Number(this.el<HTMLInputElement>("seed").value || "0");
      void this.startSession(task, scene, seed);
    });
  }

  async startSession(task: string, scene: string, seed: number): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    this.setStatus("starting...");
    try {
      const res = await this.fetcher(`${this.base}/api/session`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ task, scene, seed }),
      });
      const data = (await res.json()) as SessionResponse;
      if (!res.ok || data.error) {
        this.lastError = data.error?.message ?? `gateway error ${res.status}`;
        this.setStatus(`connection failed: ${this.lastError} (retry with Start)`);
        return;
      }
      this.sid = data.sid;
      this.payload = data.payload;
      this.legal = data.legal;
      this.recording = data.recording;
      this.lastError = null;
      this.busy = false;
      this.render();
    } catch (err) {
      this.lastError = String(err);
      this.setStatus(`connection failed: ${this.lastError} (retry with Start)`);
    } finally {
      this.busy = false;
      this.hooks.onUpdate?.();
    }
  }

  /** One discrete step. viewStep is the stale-view guard. */
  async act(action: DiscreteAction, viewStep: number): Promise<void> {
    if (!this.sid || !this.payload) return;
    if (this.busy || this.payload.done) return;
    if (viewStep !== this.payload.step) {
      this.lastError = "stale view ignored";
      this.render();
      return;
    }
    this.busy = true;
    this.render();
    try {
      const res = await this.fetcher(`${this.base}/api/session/${this.sid}/act`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ action }),
      });
      const data = (await res.json()) as ActResponse;
      if (data.error) {
        // e.g. a devtools-forged action: show the server's reason, resync
        this.lastError = data.error.message;
        await this.resync();
        return;
      }
      this.payload = data.payload;
      this.legal = data.legal;
      this.lastError = data.payload.failed ? `action failed: ${data.payload.failure_reason}` : null;
    } catch (err) {
      this.lastError = String(err);
    } finally {
      this.busy = false;
      this.render();
      this.hooks.onUpdate?.();
    }
  }

  private async resync(): Promise<void> {
    if (!this.sid) return;
    const res = await this.fetcher(`${this.base}/api/session/${this.sid}/state?raster=1`);
    const data = (await res.json()) as ActResponse;
    if (!data.error) {
      this.payload = data.payload;
      this.legal = data.legal;
    }
  }

  private setStatus(text: string): void {
    this.el("status").textContent = text;
  }

  // -- rendering ------------------------------------------------------------

  render(): void {
    const payload = this.payload;
    if (!payload) return;
    this.setStatus(
      `${payload.task} on ${payload.scene} (seed ${payload.seed}), step ${payload.step}`
        + (this.recording ? " [recording]" : ""));
    this.viewStep = payload.step;
    this.renderMap(payload.raster, payload.agent.facing);
    this.renderNearby(payload.nearby, payload.held);
    this.renderGoals(payload);
    this.renderActions(payload);
    this.renderBanner(payload);
    this.el("error").textContent = this.lastError ?? "";
  }

  private renderMap(raster: Raster | null, facing: string): void {
    const board = this.el("board");
    board.textContent = "";
    if (!raster) return;
    const cells = raster.size / CELL_BLOCK;
    board.style.setProperty("--cells", String(cells));
    const centre = Math.floor(cells / 2);
    for (let cy = 0; cy < cells; cy += 1) {
      for (let cx = 0; cx < cells; cx += 1) {
        const cls = raster.class_ids[cy * CELL_BLOCK][cx * CELL_BLOCK];
        const inst = raster.instance_ids[cy * CELL_BLOCK][cx * CELL_BLOCK];
        const cell = this.doc.createElement("div");
        cell.className = "cell";
        cell.style.background = PALETTE[cls % PALETTE.length];
        if (cls > 0) cell.title = `#${inst}`;
        if (cx === centre && cy === centre) {
          cell.classList.add("agent");
          cell.textContent = { N: "↑", E: "→", S: "↓", W: "←" }[facing] ?? "@";
        }
        board.appendChild(cell);
      }
    }
  }

  private renderNearby(nearby: NearbyRecord[], held: number | null): void {
    const panel = this.el("nearby");
    panel.textContent = "";
    for (const rec of nearby) {
      const row = this.doc.createElement("li");
      row.dataset.id = String(rec.id);
      let text = `${rec.cls} #${rec.id}`;
      if (rec.kind === "receptacle") {
        if (rec.open !== null && rec.open !== undefined) text += rec.open ? " [open]" : " [closed]";
        if (rec.contents) text += ` (${rec.contents.length} items)`;
      } else if (rec.kind === "ingredient") {
        const flags = Object.entries(rec.states ?? {})
          .filter(([, v]) => v).map(([k]) => k);
        text += flags.length ? ` [${flags.join(", ")}]` : " [raw]";
        if (rec.held) text += " (in hand)";
      }
      row.textContent = text;
      panel.appendChild(row);
    }
    this.el("held").textContent = held === null ? "hands empty" : `holding #${held}`;
  }

  private renderGoals(payload: ObservationPayload): void {
    const list = this.el("goals");
    list.textContent = "";
    payload.goals.predicates.forEach((pred, i) => {
      const row = this.doc.createElement("li");
      const done = payload.goals.satisfied[i];
      row.className = done ? "goal done" : "goal";
      row.textContent = `${done ? "☑" : "☐"} ${pred}`;
      list.appendChild(row);
    });
  }

  private renderActions(payload: ObservationPayload): void {
    const bar = this.el("actions");
    bar.textContent = "";
    for (const action of this.legal) {
      const button = this.doc.createElement("button");
      button.dataset.action = JSON.stringify(action);
      button.dataset.key = actionKey(action);
      button.textContent = actionLabel(action, payload.nearby);
      button.disabled = this.busy || payload.done;
      const step = payload.step;
      button.addEventListener("click", () => void this.act(action, step));
      bar.appendChild(button);
    }
  }

  private renderBanner(payload: ObservationPayload): void {
    const banner = this.el("banner");
    if (!payload.done) {
      banner.className = "hidden";
      banner.textContent = "";
      return;
    }
    banner.className = payload.done_reason === "success" ? "banner success" : "banner timeout";
    banner.textContent = payload.done_reason === "success"
      ? "Task complete!" : "Out of steps.";
    if (this.recording && this.sid) {
      const link = this.doc.createElement("a");
      link.href = `${this.base}/api/session/${this.sid}/recording`;
      link.textContent = "download trajectory";
      link.id = "download";
      banner.appendChild(this.doc.createTextNode(" "));
      banner.appendChild(link);
    }
  }
}

export function initApp(doc: Document, baseUrl = "", fetcher?: typeof fetch,
                        hooks: AppHooks = {}): DemoApp {
  const app = new DemoApp(doc, baseUrl, fetcher, hooks);
  app.bind();
  return app;
}
