/**
 * Gateway wire protocol: newline-delimited JSON frames, one self-describing
 * message per line, identical schema to the session log records. Every
 * message carries the format version field `v`.
 */

export const FORMAT_VERSION = 1;

export type EventKind = "note_on" | "note_off" | "selection";

export interface HelloMessage {
  v: number;
  type: "hello";
  session?: string;
}

export interface TrialStartMessage {
  v: number;
  type: "trial_start";
  trial: string;
  t: number;
}

export interface SampleMessage {
  v: number;
  type: "sample";
  trial: string;
  t: number;
  values: number[];
}

export interface EventMessage {
  v: number;
  type: "event";
  trial: string;
  t: number;
  kind: EventKind;
  pitch?: number;
  velocity?: number;
  position?: number;
}

export interface TrialEndMessage {
  v: number;
  type: "trial_end";
  trial: string;
  t: number;
  completed?: boolean;
  aborted?: boolean;
}

export interface PlanMessage {
  v: number;
  type: "plan";
  session: string;
  payload: { plan: PlanDocument; device: DeviceDocument };
}

export interface AckMessage {
  v: number;
  type: "ack";
  trial: string;
  metrics: Record<string, unknown>;
}

export interface ProtocolErrorMessage {
  v: number;
  type: "protocol_error";
  reason: string;
}

export type ClientMessage =
  | HelloMessage
  | TrialStartMessage
  | SampleMessage
  | EventMessage
  | TrialEndMessage;

export type ServerMessage = PlanMessage | AckMessage | ProtocolErrorMessage;

export type TrialMessage = Exclude<ClientMessage, HelloMessage>;

/** Plan document served in the gateway's plan frame. */
export interface PlanDocument {
  trials: TrialDocument[];
  seed: number;
  device: string;
  n_blocks: number;
}

export interface AcquisitionTrial {
  type: "acquisition";
  amplitude: number;
  width: number;
  units: "screen" | "cents";
  dimensions: 1 | 2;
  selection: "click" | "dwell";
  dwell_ms: number | null;
  rep: number;
}

export interface PathDocument {
  segments: Array<
    | { kind: "straight"; length: number }
    | { kind: "arc"; radius: number; angle: number }
  >;
  width_profile: Array<[number, number]>;
}

export interface SteeringTrial {
  type: "steering";
  path: PathDocument;
  difficulty: number;
  rep: number;
}

export interface MusicalTrial {
  type: "musical";
  kind: string;
  onsets: number[];
  pitches: number[][];
  tempo: number | null;
  polyphony: number;
  articulation: string | null;
  reference: Array<[number, number]>;
  params: Record<string, unknown>;
  rep: number;
}

export type TrialDocument = AcquisitionTrial | SteeringTrial | MusicalTrial;

export interface DeviceDocument {
  name: string;
  dimensions: Array<Record<string, unknown>>;
}

export function trialId(index: number): string {
  return `t-${String(index).padStart(4, "0")}`;
}

export function encodeFrame(message: ClientMessage): string {
  return JSON.stringify(message) + "\n";
}

/** Reassembles newline-delimited frames from arbitrary stream chunks. */
export class FrameDecoder {
  private buffer = "";

  push(chunk: string): ServerMessage[] {
    this.buffer += chunk;
    const out: ServerMessage[] = [];
    let idx: number;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, idx).trim();
      this.buffer = this.buffer.slice(idx + 1);
      if (line.length > 0) {
        out.push(JSON.parse(line) as ServerMessage);
      }
    }
    return out;
  }
}

/**
 * Client-side mirror of the gateway's ingestion state machine:
 * trial_start -> (sample | event)* -> trial_end, timestamps non-decreasing
 * within the trial. Capture paths run every outgoing message through this
 * so a conforming stream can never draw a protocol_error.
 */
export class StreamValidator {
  private active: string | null = null;
  private lastT = 0;
  private ended = new Set<string>();

  validate(message: TrialMessage): string | null {
    if (message.v !== FORMAT_VERSION) {
      return `unsupported message version ${message.v}`;
    }
    if (!Number.isFinite(message.t)) {
      return `non-finite timestamp ${message.t}`;
    }
    switch (message.type) {
      case "trial_start":
        if (this.active !== null) return `trial ${this.active} is still open`;
        if (this.ended.has(message.trial)) return `duplicate trial id ${message.trial}`;
        return null;
      case "sample":
      case "event":
        if (this.active === null) return `${message.type} before trial_start`;
        if (message.trial !== this.active) return `message for wrong trial ${message.trial}`;
        if (message.t < this.lastT) return `out-of-order timestamp ${message.t} < ${this.lastT}`;
        return null;
      case "trial_end":
        if (this.active === null) return "trial_end before trial_start";
        if (message.trial !== this.active) return `trial_end for wrong trial ${message.trial}`;
        if (message.t < this.lastT) return `out-of-order timestamp ${message.t} < ${this.lastT}`;
        return null;
    }
  }

  /** Validate and advance; throws on a violation. */
  accept(message: TrialMessage): void {
    const problem = this.validate(message);
    if (problem !== null) {
      throw new Error(`protocol violation: ${problem}`);
    }
    switch (message.type) {
      case "trial_start":
        this.active = message.trial;
        this.lastT = message.t;
        break;
      case "trial_end":
        this.ended.add(message.trial);
        this.active = null;
        this.lastT = message.t;
        break;
      default:
        this.lastT = message.t;
    }
  }
}
