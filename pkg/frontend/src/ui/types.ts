// Payload shapes the UI consumes. Everything here mirrors the wire docs;
// the UI never derives legality or rewards itself.

export type DiscreteAction =
  | { type: "take" | "put_into" | "use" | "navigate" | "toggle"; target: number }
  | { type: "turn" };

export interface NearbyRecord {
  id: number;
  kind: "tool" | "receptacle" | "ingredient";
  cls: string;
  cell: [number, number];
  set?: string;
  states?: Record<string, boolean>;
  open?: boolean | null;
  capacity?: number;
  contents?: number[] | null;
  in?: number | null;
  held?: boolean;
}

export interface Raster {
  size: number;
  class_ids: number[][];
  instance_ids: number[][];
}

export interface GoalView {
  predicates: string[];
  satisfied: boolean[];
  latched: boolean[];
}

export interface ObservationPayload {
  proto_version: number;
  mode: string;
  task: string;
  scene: string;
  seed: number;
  step: number;
  agent: { cell: [number, number]; facing: string };
  held: number | null;
  nearby: NearbyRecord[];
  goals: GoalView;
  reward: number;
  done: boolean;
  done_reason: string | null;
  raster: Raster | null;
  failed?: boolean;
  failure_reason?: string | null;
}

export interface SessionResponse {
  sid: string;
  payload: ObservationPayload;
  legal: DiscreteAction[];
  recording: boolean;
  error?: { code: string; message: string };
}

export interface ActResponse {
  payload: ObservationPayload;
  legal: DiscreteAction[];
  error?: { code: string; message: string };
}
