import { afterEach, describe, expect, it, vi } from "vitest";

import { MetronomeScheduler, type AudioClock } from "../src/metronome.js";

class FakeClock implements AudioClock {
  currentTime = 0;

  advance(dt: number): void {
    this.currentTime += dt;
  }
}

afterEach(() => {
  vi.useRealTimers();
});

describe("MetronomeScheduler", () => {
  it("schedules tick k at exactly k*60/bpm after the start time", () => {
    const clock = new FakeClock();
    const scheduler = new MetronomeScheduler(clock, {
      bpm: 120,
      startDelayS: 0.05,
      scheduleAheadS: 0.1,
      count: 16,
    });
    const ticks: Array<[number, number]> = [];
    vi.useFakeTimers();
    scheduler.start((index, time) => ticks.push([index, time]));
    // pump a simulated 10 seconds of clock in lookahead-sized steps
    for (let step = 0; step < 400; step++) {
      clock.advance(0.025);
      scheduler.pump();
    }
    scheduler.stop();

    expect(ticks.length).toBe(16);
    const start = ticks[0]![1];
    for (const [index, time] of ticks) {
      const expected = start + (index * 60) / 120;
      expect(Math.abs(time - expected)).toBeLessThan(0.005); // 5 ms budget
    }
  });

  it("hands every tick to the audio clock ahead of its deadline", () => {
    const clock = new FakeClock();
    const scheduler = new MetronomeScheduler(clock, { bpm: 90, scheduleAheadS: 0.12, count: 12 });
    const leadTimes: number[] = [];
    vi.useFakeTimers();
    scheduler.start((_, time) => leadTimes.push(time - clock.currentTime));
    for (let step = 0; step < 600; step++) {
      clock.advance(0.02);
      scheduler.pump();
    }
    scheduler.stop();
    expect(leadTimes.length).toBe(12);
    // scheduled strictly before the deadline, within the lookahead window
    for (const lead of leadTimes) {
      expect(lead).toBeGreaterThan(0);
      expect(lead).toBeLessThanOrEqual(0.12 + 1e-9);
    }
  });

  it("tick periods are exact for different tempi", () => {
    const clock = new FakeClock();
    for (const bpm of [60, 90, 120, 180]) {
      const scheduler = new MetronomeScheduler(clock, { bpm });
      expect(scheduler.tickTime(4) - scheduler.tickTime(3)).toBeCloseTo(60 / bpm, 12);
    }
  });

  it("rejects a non-positive tempo", () => {
    expect(() => new MetronomeScheduler(new FakeClock(), { bpm: 0 })).toThrow();
  });
});
