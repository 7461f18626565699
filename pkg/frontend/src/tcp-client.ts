// One TCP session against the environment server: strict request/response
// alternation, promises resolved in request order.

import net from "node:net";
import { FrameReader, PROTO_VERSION, ResponseFrame, encodeFrame } from "./protocol.js";

export class ServerError extends Error {
  constructor(public code: string, message: string) {
    super(`${code}: ${message}`);
  }
}

interface Pending {
  resolve: (payload: Record<string, unknown>) => void;
  reject: (err: Error) => void;
}

export class TcpSession {
  private socket: net.Socket;
  private reader = new FrameReader();
  private pending: Pending[] = [];
  private queue: Promise<unknown> = Promise.resolve();
  private seq = 0;
  closed = false;

  private constructor(socket: net.Socket, readonly session: string) {
    this.socket = socket;
    socket.on("data", (chunk) => {
      for (const frame of this.reader.push(chunk)) this.dispatch(frame);
    });
    socket.on("error", (err) => this.fail(err));
    socket.on("close", () => this.fail(new Error("connection closed")));
  }

  static connect(host: string, port: number, session: string): Promise<TcpSession> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port, noDelay: true });
      socket.once("connect", () => resolve(new TcpSession(socket, session)));
      socket.once("error", reject);
    });
  }

  private dispatch(frame: ResponseFrame): void {
    const waiter = this.pending.shift();
    if (!waiter) return; // unsolicited frame; nothing sensible to do
    if (frame.ok) {
      waiter.resolve(frame.payload ?? {});
    } else {
      const err = frame.error ?? { code: "unknown", message: "no error info" };
      waiter.reject(new ServerError(err.code, err.message));
    }
  }

  private fail(err: Error): void {
    this.closed = true;
    while (this.pending.length) this.pending.shift()!.reject(err);
  }

  /** Send one command; requests are serialized (protocol alternation). */
  request(cmd: string, fields: Record<string, unknown> = {}): Promise<Record<string, unknown>> {
    const run = () =>
      new Promise<Record<string, unknown>>((resolve, reject) => {
        if (this.closed) {
          reject(new Error("session closed"));
          return;
        }
        this.seq += 1;
        this.pending.push({ resolve, reject });
        this.socket.write(
          encodeFrame({ proto_version: PROTO_VERSION, session: this.session, seq: this.seq, cmd, ...fields }),
        );
      });
    const result = this.queue.then(run, run);
    this.queue = result.catch(() => undefined);
    return result;
  }

  close(): void {
    this.closed = true;
    this.socket.destroy();
  }
}
