/**
 * Lookahead metronome: tick k is scheduled at exactly k*60/bpm seconds
 * after the start time on the audio clock. A coarse timer pumps the
 * scheduler every `lookaheadMs` and schedules every tick whose deadline
 * falls within the next `scheduleAheadS` seconds, so audible timing rides
 * on the audio clock rather than on timer jitter.
 */

export interface AudioClock {
  readonly currentTime: number;
}

export type TickCallback = (index: number, timeS: number) => void;

export interface MetronomeOptions {
  bpm: number;
  lookaheadMs?: number;
  scheduleAheadS?: number;
  startDelayS?: number;
  count?: number;
}

export class MetronomeScheduler {
  private readonly bpm: number;
  private readonly lookaheadMs: number;
  private readonly scheduleAheadS: number;
  private readonly startDelayS: number;
  private readonly count: number | null;

  private startTime = 0;
  private nextIndex = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  private onTick: TickCallback = () => {};

  constructor(private readonly clock: AudioClock, options: MetronomeOptions) {
    if (!(options.bpm > 0)) {
      throw new Error(`bpm must be > 0, got ${options.bpm}`);
    }
    this.bpm = options.bpm;
    this.lookaheadMs = options.lookaheadMs ?? 25;
    this.scheduleAheadS = options.scheduleAheadS ?? 0.12;
    this.startDelayS = options.startDelayS ?? 0.05;
    this.count = options.count ?? null;
  }

  get period(): number {
    return 60 / this.bpm;
  }

  /** Scheduled audio-clock time of tick k. */
  tickTime(index: number): number {
    return this.startTime + index * this.period;
  }

  start(onTick: TickCallback): void {
    this.stop();
    this.onTick = onTick;
    this.nextIndex = 0;
    this.startTime = this.clock.currentTime + this.startDelayS;
    this.timer = setInterval(() => this.pump(), this.lookaheadMs);
    this.pump();
  }

  /**
   * Schedule every tick due within the lookahead window. Exposed so tests
   * can drive the scheduler with a fake clock instead of a timer.
   */
  pump(): void {
    const horizon = this.clock.currentTime + this.scheduleAheadS;
    while (this.tickTime(this.nextIndex) < horizon) {
      if (this.count !== null && this.nextIndex >= this.count) {
        this.stop();
        return;
      }
      this.onTick(this.nextIndex, this.tickTime(this.nextIndex));
      this.nextIndex += 1;
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
