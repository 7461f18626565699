// HTTP gateway bridging the browser to the TCP frame protocol.
//
// The browser cannot open raw TCP sockets, so each UI session maps to one
// TCP session held here. The turn-based protocol fits plain request/response
// HTTP; no websocket needed. The gateway adds no game logic: every answer
// is the server's payload passed through, plus the legal-action list the
// UI renders as buttons.

import express from "express";
import type { Express } from "express";
import fs from "node:fs";
import path from "node:path";
import { randomUUID } from "node:crypto";
import type { AddressInfo } from "node:net";
import { ServerError, TcpSession } from "./tcp-client.js";

interface GatewaySessionState {
  tcp: TcpSession;
  task: string;
  recordingPath: string | null;
  done: boolean;
}

export interface GatewayOptions {
  serverHost: string;
  serverPort: number;
  staticDir?: string;
  /** Names under which recordings are requested, relative to the server's --record-dir. */
  recordPrefix?: string;
}

export function createGatewayApp(options: GatewayOptions): Express {
  const sessions = new Map<string, GatewaySessionState>();
  const app = express();
  app.use(express.json());

  const fail = (res: express.Response, err: unknown): void => {
    if (err instanceof ServerError) {
      res.status(409).json({ error: { code: err.code, message: err.message } });
    } else {
      res.status(500).json({ error: { code: "gateway", message: String(err) } });
    }
  };

  app.post("/api/session", async (req, res) => {
    const { task, scene, seed, record } = req.body ?? {};
    if (typeof task !== "string") {
      res.status(400).json({ error: { code: "bad_request", message: "task required" } });
      return;
    }
    const sid = randomUUID().slice(0, 8);
    try {
      const tcp = await TcpSession.connect(options.serverHost, options.serverPort, sid);
      const payload = await tcp.request("reset", {
        task,
        ...(typeof scene === "string" ? { scene } : {}),
        seed: typeof seed === "number" ? seed : 0,
        obs: "raster",
      });
      let recordingPath: string | null = null;
      if (record !== false) {
        const name = `${options.recordPrefix ?? "ui"}_${sid}.traj`;
        const rec = await tcp.request("start_recording", { path: name });
        recordingPath = rec.recording as string;
      }
      const legal = payload.mode === "discrete"
        ? (await tcp.request("legal_actions")).actions
        : [];
      sessions.set(sid, { tcp, task, recordingPath, done: Boolean(payload.done) });
      res.json({ sid, payload, legal, recording: recordingPath !== null });
    } catch (err) {
      fail(res, err);
    }
  });

  app.post("/api/session/:sid/act", async (req, res) => {
    const state = sessions.get(req.params.sid);
    if (!state) {
      res.status(404).json({ error: { code: "no_session", message: "unknown session" } });
      return;
    }
    try {
      const payload = await state.tcp.request("step_discrete", { action: req.body?.action, obs: "raster" });
      state.done = Boolean(payload.done);
      const legal = state.done ? [] : (await state.tcp.request("legal_actions")).actions;
      if (state.done && state.recordingPath) {
        await state.tcp.request("stop_recording");
      }
      res.json({ payload, legal });
    } catch (err) {
      fail(res, err);
    }
  });

  app.get("/api/session/:sid/state", async (req, res) => {
    const state = sessions.get(req.params.sid);
    if (!state) {
      res.status(404).json({ error: { code: "no_session", message: "unknown session" } });
      return;
    }
    try {
      const withRaster = req.query.raster === "1";
      const payload = await state.tcp.request("observe", withRaster ? { obs: "raster" } : {});
      const legal = state.done ? [] : (await state.tcp.request("legal_actions")).actions;
      res.json({ payload, legal });
    } catch (err) {
      fail(res, err);
    }
  });

  app.get("/api/session/:sid/recording", (req, res) => {
    const state = sessions.get(req.params.sid);
    if (!state || !state.recordingPath) {
      res.status(404).json({ error: { code: "no_recording", message: "nothing recorded" } });
      return;
    }
    res.setHeader("Content-Type", "application/jsonl");
    res.setHeader("Content-Disposition",
      `attachment; filename="${path.basename(state.recordingPath)}"`);
    fs.createReadStream(state.recordingPath).pipe(res);
  });

  app.delete("/api/session/:sid", (req, res) => {
    const state = sessions.get(req.params.sid);
    if (state) {
      state.tcp.close();
      sessions.delete(req.params.sid);
    }
    res.json({ closed: true });
  });

  if (options.staticDir) {
    app.use(express.static(options.staticDir));
  }
  return app;
}

export function startGateway(
  options: GatewayOptions & { port?: number },
): Promise<{ port: number; close: () => void }> {
  const app = createGatewayApp(options);
  return new Promise((resolve) => {
    const server = app.listen(options.port ?? 0, "127.0.0.1", () => {
      const { port } = server.address() as AddressInfo;
      resolve({ port, close: () => server.close() });
    });
  });
}
