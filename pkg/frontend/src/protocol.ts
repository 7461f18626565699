// Shared wire-protocol shapes for the gateway side (node).

export const PROTO_VERSION = 1;

export interface RequestFrame {
  proto_version: number;
  session: string;
  seq: number;
  cmd: string;
  [key: string]: unknown;
}

export interface ErrorInfo {
  code: string;
  message: string;
}

export interface ResponseFrame {
  proto_version: number;
  session: string | null;
  seq: number | null;
  ok: boolean;
  payload?: Record<string, unknown>;
  error?: ErrorInfo;
}

export type DiscreteAction =
  | { type: "take" | "put_into" | "use" | "navigate" | "toggle"; target: number }
  | { type: "turn" };

export function encodeFrame(obj: unknown): Buffer {
  const body = Buffer.from(JSON.stringify(obj), "utf-8");
  const header = Buffer.alloc(4);
  header.writeUInt32BE(body.length, 0);
  return Buffer.concat([header, body]);
}

/** Incremental frame splitter for a TCP byte stream. */
export class FrameReader {
  private buffer = Buffer.alloc(0);

  push(chunk: Buffer): ResponseFrame[] {
    this.buffer = Buffer.concat([this.buffer, chunk]);
    const frames: ResponseFrame[] = [];
    for (;;) {
      if (this.buffer.length < 4) break;
      const length = this.buffer.readUInt32BE(0);
      if (this.buffer.length < 4 + length) break;
      const body = this.buffer.subarray(4, 4 + length);
      this.buffer = this.buffer.subarray(4 + length);
      frames.push(JSON.parse(body.toString("utf-8")) as ResponseFrame);
    }
    return frames;
  }
}
