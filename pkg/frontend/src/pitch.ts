/**
 * Pitch feedback: play the produced pitch and display its signed cents
 * offset from the target. Audio goes through a small oscillator interface
 * so the display logic stays testable without Web Audio; when no audio is
 * available the tone is skipped and the visual offset is still produced.
 */

export function centsOffset(producedHz: number, targetHz: number): number {
  if (!(producedHz > 0) || !(targetHz > 0)) {
    throw new Error(`pitches must be > 0, got ${producedHz} / ${targetHz}`);
  }
  return 1200 * Math.log2(producedHz / targetHz);
}

export function midiToHz(note: number, a4 = 440): number {
  return a4 * Math.pow(2, (note - 69) / 12);
}

export interface ToneSink {
  /** play a tone at `hz` for `durationS` seconds */
  play(hz: number, durationS: number): void;
}

export interface PitchFeedback {
  centsOffset: number;
  audible: boolean;
}

export class FeedbackTone {
  constructor(private readonly sink: ToneSink | null) {}

  /** Sound the produced pitch and report the offset display value. */
  feedback(producedHz: number, targetHz: number, durationS = 0.25): PitchFeedback {
    const offset = centsOffset(producedHz, targetHz);
    if (this.sink === null) {
      return { centsOffset: offset, audible: false };
    }
    this.sink.play(producedHz, durationS);
    return { centsOffset: offset, audible: true };
  }
}

/** Web Audio oscillator sink; construct only where AudioContext exists. */
export function webAudioSink(context: {
  currentTime: number;
  createOscillator(): OscillatorNode;
  createGain(): GainNode;
  destination: AudioDestinationNode;
}): ToneSink {
  return {
    play(hz: number, durationS: number): void {
      const osc = context.createOscillator();
      const gain = context.createGain();
      osc.frequency.value = hz;
      osc.type = "sine";
      gain.gain.setValueAtTime(0.0, context.currentTime);
      gain.gain.linearRampToValueAtTime(0.3, context.currentTime + 0.005);
      gain.gain.linearRampToValueAtTime(0.0, context.currentTime + durationS);
      osc.connect(gain);
      gain.connect(context.destination);
      osc.start(context.currentTime);
      osc.stop(context.currentTime + durationS + 0.01);
    },
  };
}
