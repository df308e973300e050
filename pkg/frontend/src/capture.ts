/**
 * Trial capture: turns input callbacks (pointer samples, note events,
 * selections) into a gateway message stream bracketed by trial_start /
 * trial_end. Timestamps come from the injected clock and are forced
 * strictly monotone; every outgoing message passes the client-side state
 * machine, so a capture can never emit a stream the gateway rejects.
 */

import {
  FORMAT_VERSION,
  StreamValidator,
  type EventKind,
  type TrialMessage,
} from "./protocol.js";

export interface CaptureClock {
  /** seconds, monotone (audio clock or performance.now()/1000) */
  now(): number;
}

export type MessageSink = (message: TrialMessage) => void;

const MIN_STEP_S = 1e-6;

export class CaptureSession {
  static readonly NOMINAL_SAMPLE_RATE_HZ = 125;

  private readonly validator = new StreamValidator();
  private lastT = -Infinity;
  private open = false;

  constructor(
    private readonly trialId: string,
    private readonly clock: CaptureClock,
    private readonly sink: MessageSink,
  ) {}

  get isOpen(): boolean {
    return this.open;
  }

  private stamp(): number {
    // clamp clock regressions so the stream stays strictly increasing
    const now = this.clock.now();
    const t = now > this.lastT ? now : this.lastT + MIN_STEP_S;
    this.lastT = t;
    return t;
  }

  private emit(message: TrialMessage): void {
    this.validator.accept(message);
    this.sink(message);
  }

  start(): void {
    if (this.open) throw new Error(`trial ${this.trialId} already started`);
    this.open = true;
    this.emit({ v: FORMAT_VERSION, type: "trial_start", trial: this.trialId, t: this.stamp() });
  }

  sample(values: number[]): void {
    this.requireOpen("sample");
    this.emit({
      v: FORMAT_VERSION,
      type: "sample",
      trial: this.trialId,
      t: this.stamp(),
      values,
    });
  }

  noteOn(pitch: number, velocity: number): void {
    this.event("note_on", { pitch, velocity });
  }

  noteOff(pitch: number): void {
    this.event("note_off", { pitch });
  }

  selection(position: number): void {
    this.event("selection", { position });
  }

  private event(kind: EventKind, fields: { pitch?: number; velocity?: number; position?: number }): void {
    this.requireOpen(kind);
    this.emit({
      v: FORMAT_VERSION,
      type: "event",
      trial: this.trialId,
      t: this.stamp(),
      kind,
      ...fields,
    });
  }

  end(completed = true): void {
    this.requireOpen("trial_end");
    this.open = false;
    this.emit({
      v: FORMAT_VERSION,
      type: "trial_end",
      trial: this.trialId,
      t: this.stamp(),
      completed,
      aborted: false,
    });
  }

  /** Device disconnects and teardown paths end the trial as aborted. */
  abort(): void {
    if (!this.open) return;
    this.open = false;
    this.emit({
      v: FORMAT_VERSION,
      type: "trial_end",
      trial: this.trialId,
      t: this.stamp(),
      completed: false,
      aborted: true,
    });
  }

  private requireOpen(what: string): void {
    if (!this.open) throw new Error(`${what} outside an open trial`);
  }
}
