/**
 * Scene geometry: pure functions mapping a trial document and viewport
 * scale to the shapes the renderer draws. Everything is deterministic in
 * (task, scale), so scenes can be unit-tested without a DOM.
 */

import type {
  AcquisitionTrial,
  MusicalTrial,
  PathDocument,
  SteeringTrial,
  TrialDocument,
} from "./protocol.js";

export interface Point {
  x: number;
  y: number;
}

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface AcquisitionScene {
  kind: "acquisition";
  /** where the pointer must rest before the go signal */
  startZone: Rect;
  /** the band to acquire, W wide, centered A away from the start */
  target: Rect;
  distancePx: number;
  widthPx: number;
  dwellMs: number | null;
}

export interface SteeringScene {
  kind: "steering";
  /** closed outline: left edge forward, right edge back */
  tunnel: Point[];
  centerline: Point[];
  startPx: Point;
  endPx: Point;
}

export interface PitchLaneScene {
  kind: "pitch-lane";
  /** metronome tick times in seconds from the go signal */
  ticks: number[];
  /** one lane row per distinct pitch, low at the bottom */
  lanes: Array<{ pitch: number; y: number }>;
  /** note rectangles: scheduled onset -> x, pitch -> lane y */
  notes: Array<{ t: number; pitch: number; x: number; y: number }>;
  secondsPerPixel: number;
}

export interface ErrorScene {
  kind: "error";
  reason: string;
}

export type SceneState = AcquisitionScene | SteeringScene | PitchLaneScene | ErrorScene;

const LANE_SPACING_PX = 14;
const TIME_SCALE_PX_PER_S = 120;

export interface Viewport {
  /** device units to pixels */
  scale: number;
  origin?: Point;
}

export function presentTrial(task: TrialDocument, viewport: Viewport): SceneState {
  switch (task.type) {
    case "acquisition":
      return acquisitionScene(task, viewport);
    case "steering":
      return steeringScene(task, viewport);
    case "musical":
      return pitchLaneScene(task, viewport);
    default:
      return { kind: "error", reason: `unknown task kind ${(task as { type?: string }).type}` };
  }
}

function acquisitionScene(task: AcquisitionTrial, viewport: Viewport): AcquisitionScene {
  const origin = viewport.origin ?? { x: 0, y: 0 };
  const distancePx = task.amplitude * viewport.scale;
  const widthPx = task.width * viewport.scale;
  const startWidth = Math.max(8, widthPx / 2);
  return {
    kind: "acquisition",
    startZone: { x: origin.x - startWidth / 2, y: origin.y - 40, width: startWidth, height: 80 },
    target: {
      x: origin.x + distancePx - widthPx / 2,
      y: origin.y - 40,
      width: widthPx,
      height: 80,
    },
    distancePx,
    widthPx,
    dwellMs: task.selection === "dwell" ? task.dwell_ms : null,
  };
}

/** Centerline point at normalized arc length s; starts at the origin
 * heading +x, heading continuous across segments (mirrors the backend). */
export function pathPoint(path: PathDocument, s: number): Point {
  const total = pathLength(path);
  let remaining = s * total;
  let x = 0;
  let y = 0;
  let heading = 0;
  for (const seg of path.segments) {
    const segLen = seg.kind === "straight" ? seg.length : seg.radius * Math.abs(seg.angle);
    const d = Math.min(remaining, segLen);
    if (seg.kind === "straight") {
      x += d * Math.cos(heading);
      y += d * Math.sin(heading);
    } else {
      const side = Math.sign(seg.angle);
      const sweep = (side * d) / seg.radius;
      const cx = x - side * seg.radius * Math.sin(heading);
      const cy = y + side * seg.radius * Math.cos(heading);
      const phi = Math.atan2(y - cy, x - cx) + sweep;
      x = cx + seg.radius * Math.cos(phi);
      y = cy + seg.radius * Math.sin(phi);
      heading += sweep;
    }
    remaining -= d;
    if (remaining <= 0) break;
  }
  return { x, y };
}

export function pathLength(path: PathDocument): number {
  return path.segments.reduce(
    (acc, seg) => acc + (seg.kind === "straight" ? seg.length : seg.radius * Math.abs(seg.angle)),
    0,
  );
}

export function widthAt(path: PathDocument, s: number): number {
  const knots = path.width_profile;
  for (let i = 0; i + 1 < knots.length; i++) {
    const [s0, w0] = knots[i]!;
    const [s1, w1] = knots[i + 1]!;
    if (s0 <= s && s <= s1 && s1 > s0) {
      return w0 + ((w1 - w0) * (s - s0)) / (s1 - s0);
    }
  }
  return knots[knots.length - 1]![1];
}

function steeringScene(task: SteeringTrial, viewport: Viewport, pieces = 256): SteeringScene {
  const origin = viewport.origin ?? { x: 0, y: 0 };
  const centerline: Point[] = [];
  const left: Point[] = [];
  const right: Point[] = [];
  for (let i = 0; i <= pieces; i++) {
    const s = i / pieces;
    const p = pathPoint(task.path, s);
    const q = pathPoint(task.path, Math.min(1, s + 1e-4));
    const dx = q.x - p.x;
    const dy = q.y - p.y;
    const norm = Math.hypot(dx, dy) || 1;
    const half = (widthAt(task.path, s) / 2) * viewport.scale;
    const px = origin.x + p.x * viewport.scale;
    const py = origin.y + p.y * viewport.scale;
    centerline.push({ x: px, y: py });
    left.push({ x: px - (dy / norm) * half, y: py + (dx / norm) * half });
    right.push({ x: px + (dy / norm) * half, y: py - (dx / norm) * half });
  }
  return {
    kind: "steering",
    tunnel: [...left, ...right.reverse()],
    centerline,
    startPx: centerline[0]!,
    endPx: centerline[centerline.length - 1]!,
  };
}

function pitchLaneScene(task: MusicalTrial, viewport: Viewport): PitchLaneScene {
  const origin = viewport.origin ?? { x: 0, y: 0 };
  const pitches = [...new Set(task.pitches.flat())].sort((a, b) => a - b);
  const lanes = pitches.map((pitch, i) => ({
    pitch,
    y: origin.y - i * LANE_SPACING_PX,
  }));
  const laneY = new Map(lanes.map((l) => [l.pitch, l.y]));
  const notes: PitchLaneScene["notes"] = [];
  task.onsets.forEach((t, i) => {
    for (const pitch of task.pitches[i] ?? []) {
      notes.push({ t, pitch, x: origin.x + t * TIME_SCALE_PX_PER_S, y: laneY.get(pitch)! });
    }
  });
  const beat = task.tempo ? 60 / task.tempo : null;
  const end = task.onsets.length > 0 ? task.onsets[task.onsets.length - 1]! : 0;
  const ticks: number[] = [];
  if (beat !== null) {
    for (let k = 0; k * beat <= end + 1e-9; k++) ticks.push(k * beat);
  }
  return {
    kind: "pitch-lane",
    ticks,
    lanes,
    notes,
    secondsPerPixel: 1 / TIME_SCALE_PX_PER_S,
  };
}
