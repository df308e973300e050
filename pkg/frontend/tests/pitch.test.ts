import { describe, expect, it } from "vitest";

import { FeedbackTone, centsOffset, midiToHz, type ToneSink } from "../src/pitch.js";

describe("centsOffset", () => {
  it("is zero when produced equals target", () => {
    expect(centsOffset(440, 440)).toBe(0);
  });

  it("reports +1200 cents one octave above", () => {
    expect(Math.abs(centsOffset(880, 440) - 1200)).toBeLessThan(0.01);
  });

  it("matches 1200*log2(produced/target) on reference vectors", () => {
    const vectors: Array<[number, number]> = [
      [466.1637615180899, 440], // +100 cents
      [415.30469757994513, 440], // -100 cents
      [261.6255653005986, 440], // middle C vs A4
      [452.8929841231365, 440],
      [27.5, 3520],
    ];
    for (const [produced, target] of vectors) {
      const expected = 1200 * Math.log2(produced / target);
      expect(Math.abs(centsOffset(produced, target) - expected)).toBeLessThan(0.01);
    }
  });

  it("+100 cents vector from the task battery", () => {
    expect(Math.abs(centsOffset(466.1637615180899, 440) - 100)).toBeLessThan(0.01);
  });

  it("rejects non-positive pitches", () => {
    expect(() => centsOffset(0, 440)).toThrow();
    expect(() => centsOffset(440, -2)).toThrow();
  });
});

describe("midiToHz", () => {
  it("maps A4 and octaves", () => {
    expect(midiToHz(69)).toBeCloseTo(440, 9);
    expect(midiToHz(81)).toBeCloseTo(880, 9);
    expect(midiToHz(60)).toBeCloseTo(261.6255653005986, 6);
  });
});

describe("FeedbackTone", () => {
  it("plays the produced pitch through the sink", () => {
    const played: Array<[number, number]> = [];
    const sink: ToneSink = { play: (hz, d) => played.push([hz, d]) };
    const tone = new FeedbackTone(sink);
    const result = tone.feedback(466.1637615180899, 440);
    expect(result.audible).toBe(true);
    expect(Math.abs(result.centsOffset - 100)).toBeLessThan(0.01);
    expect(played).toHaveLength(1);
    expect(played[0]![0]).toBeCloseTo(466.1637615180899, 9);
  });

  it("falls back to visual-only without audio", () => {
    const tone = new FeedbackTone(null);
    const result = tone.feedback(440, 440);
    expect(result.audible).toBe(false);
    expect(result.centsOffset).toBe(0);
  });
});
