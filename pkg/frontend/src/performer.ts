/**
 * Scripted synthetic performer: executes every trial of a plan with
 * plausible input, entirely on a virtual clock. Used for conformance runs
 * against a live gateway (no hands, no audio) and as the reference for
 * what a capture path must emit.
 */

import { CaptureSession, type CaptureClock, type MessageSink } from "./capture.js";
import { pathPoint } from "./geometry.js";
import { trialId, type PlanDocument, type TrialDocument } from "./protocol.js";

class ScriptClock implements CaptureClock {
  private t = 0;

  now(): number {
    return this.t;
  }

  advanceTo(t: number): void {
    if (t > this.t) this.t = t;
  }
}

export interface SyntheticRun {
  trialsExecuted: number;
  noteEvents: number;
}

const SAMPLE_PERIOD_S = 1 / CaptureSession.NOMINAL_SAMPLE_RATE_HZ;
const NOTE_LENGTH_S = 0.08;

export class SyntheticPerformer {
  constructor(
    private readonly sink: MessageSink,
    /** seconds of virtual pause between trials */
    private readonly interTrialGapS = 0.25,
  ) {}

  run(plan: PlanDocument): SyntheticRun {
    const clock = new ScriptClock();
    let notes = 0;
    plan.trials.forEach((task, index) => {
      const capture = new CaptureSession(trialId(index), clock, this.sink);
      notes += this.performTrial(task, capture, clock);
      clock.advanceTo(clock.now() + this.interTrialGapS);
    });
    return { trialsExecuted: plan.trials.length, noteEvents: notes };
  }

  private performTrial(task: TrialDocument, capture: CaptureSession, clock: ScriptClock): number {
    const t0 = clock.now();
    capture.start();
    switch (task.type) {
      case "acquisition": {
        const mt = 0.3 + 0.08 * Math.log2(task.amplitude / task.width + 1);
        for (let t = SAMPLE_PERIOD_S; t < mt; t += SAMPLE_PERIOD_S) {
          clock.advanceTo(t0 + t);
          capture.sample([task.amplitude * (t / mt)]);
        }
        clock.advanceTo(t0 + mt);
        capture.selection(task.amplitude);
        capture.end(true);
        return 0;
      }
      case "steering": {
        const duration = 0.05 * task.difficulty;
        const steps = Math.max(2, Math.floor(duration / SAMPLE_PERIOD_S));
        for (let k = 0; k <= steps; k++) {
          const s = k / steps;
          clock.advanceTo(t0 + s * duration);
          const p = pathPoint(task.path, s);
          capture.sample([p.x, p.y]);
        }
        capture.end(true);
        return 0;
      }
      case "musical": {
        // notes and reference-tracking samples interleave in time order
        let notes = 0;
        const actions: Array<{ t: number; run: () => void }> = [];
        task.onsets.forEach((onset, i) => {
          const chord = task.pitches[i] ?? [];
          actions.push({
            t: onset,
            run: () => chord.forEach((pitch) => capture.noteOn(pitch, 96)),
          });
          actions.push({
            t: onset + NOTE_LENGTH_S,
            run: () => chord.forEach((pitch) => capture.noteOff(pitch)),
          });
          notes += chord.length;
        });
        for (const [t, value] of task.reference) {
          actions.push({ t, run: () => capture.sample([value]) });
        }
        actions.sort((a, b) => a.t - b.t);
        for (const action of actions) {
          clock.advanceTo(t0 + action.t);
          action.run();
        }
        capture.end(true);
        return notes;
      }
      default:
        capture.abort();
        return 0;
    }
  }
}
