// @vitest-environment jsdom
// UI unit tests: rendering and the stale-view guard, against a fake gateway.

import { beforeEach, describe, expect, it } from "vitest";
import { DemoApp, actionKey, actionLabel, initApp } from "../src/ui/app.js";
import type { DiscreteAction, ObservationPayload } from "../src/ui/types.js";

const BODY = `
  <select id="task"><option>fruit_juice</option></select>
  <select id="scene"><option>kitchen_a</option></select>
  <input id="seed" value="7">
  <button id="start">Start</button>
  <div id="status"></div><div id="error"></div>
  <div id="banner" class="hidden"></div>
  <div id="board"></div><div id="actions"></div>
  <ul id="goals"></ul><div id="held"></div><ul id="nearby"></ul>
`;

function payload(step: number, done = false): ObservationPayload {
  return {
    proto_version: 1, mode: "discrete", task: "fruit_juice", scene: "kitchen_a",
    seed: 7, step,
    agent: { cell: [5, 3], facing: "N" },
    held: null,
    nearby: [
      { id: 1, kind: "receptacle", cls: "fridge", cell: [-4, -3], open: false,
        capacity: 32, contents: null },
      { id: 3, kind: "tool", cls: "knife", cell: [0, -3] },
    ],
    goals: { predicates: ["fruit[cut,juiced] in cup", "fruit[cut,juiced] in cup"],
             satisfied: [false, false], latched: [false, false] },
    reward: 0, done, done_reason: done ? "success" : null,
    raster: { size: 8, class_ids: makePlane(8), instance_ids: makePlane(8) },
  };
}

function makePlane(size: number): number[][] {
  return Array.from({ length: size }, () => Array(size).fill(0));
}

const LEGAL: DiscreteAction[] = [
  { type: "navigate", target: 1 }, { type: "navigate", target: 3 }, { type: "turn" },
];

function fakeFetch(events: string[]) {
  let step = 0;
  return (async (url: RequestInfo | URL, init?: RequestInit) => {
    const path = String(url);
    events.push(path);
    let body: unknown;
    if (path.endsWith("/api/session")) {
      body = { sid: "t1", payload: payload(0), legal: LEGAL, recording: true };
    } else if (path.includes("/act")) {
      step += 1;
      const action = JSON.parse(String(init?.body)).action as DiscreteAction;
      const done = action.type === "use";
      body = { payload: payload(step, done), legal: done ? [] : LEGAL };
    } else {
      body = { payload: payload(step), legal: LEGAL };
    }
    // jsdom has no Response constructor; a minimal stand-in is enough
    return { ok: true, status: 200, json: async () => body } as unknown as Response;
  }) as typeof fetch;
}

describe("action encoding helpers", () => {
  it("builds stable keys", () => {
    expect(actionKey({ type: "turn" })).toBe("turn");
    expect(actionKey({ type: "take", target: 14 })).toBe("take:14");
  });

  it("labels actions from nearby records", () => {
    const nearby = payload(0).nearby;
    expect(actionLabel({ type: "navigate", target: 1 }, nearby)).toBe("navigate fridge #1");
    expect(actionLabel({ type: "navigate", target: 99 }, nearby)).toBe("navigate #99");
    expect(actionLabel({ type: "put_into", target: 1 }, nearby)).toBe("put into fridge #1");
  });
});

describe("DemoApp", () => {
  let app: DemoApp;
  let events: string[];

  beforeEach(async () => {
    document.body.innerHTML = BODY;
    events = [];
    app = initApp(document, "http://gw", fakeFetch(events));
    await app.startSession("fruit_juice", "kitchen_a", 7);
  });

  it("renders buttons exactly from the legal list", () => {
    const keys = [...document.querySelectorAll("#actions button")]
      .map((b) => (b as HTMLButtonElement).dataset.key);
    expect(keys).toEqual(LEGAL.map(actionKey));
  });

  it("renders the goal checklist unchecked", () => {
    const goals = [...document.querySelectorAll("#goals li")];
    expect(goals).toHaveLength(2);
    expect(goals.every((g) => g.textContent!.includes("☐"))).toBe(true);
  });

  it("shows the recording indicator", () => {
    expect(document.getElementById("status")!.textContent).toContain("recording");
  });

  it("steps on click and bumps the step counter", async () => {
    const button = document.querySelector("#actions button") as HTMLButtonElement;
    button.click();
    await vitestFlush();
    expect(app.payload!.step).toBe(1);
    expect(document.getElementById("status")!.textContent).toContain("step 1");
  });

  it("rejects stale views without a network call", async () => {
    const before = events.length;
    await app.act({ type: "turn" }, 42); // wrong step token
    expect(events.length).toBe(before);
    expect(app.payload!.step).toBe(0);
    expect(document.getElementById("error")!.textContent).toContain("stale");
  });

  it("shows the completion banner with a download link", async () => {
    await app.act({ type: "use", target: 3 } as DiscreteAction, 0);
    const banner = document.getElementById("banner")!;
    expect(banner.className).toContain("success");
    expect(banner.querySelector("a#download")).not.toBeNull();
    // no buttons remain actionable
    expect(document.querySelectorAll("#actions button")).toHaveLength(0);
  });
});

async function vitestFlush(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}
