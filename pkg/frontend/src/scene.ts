/**
 * Canvas rendering for scene states. Drawing goes through a minimal 2D
 * context interface (a structural subset of CanvasRenderingContext2D) so
 * render logic can run against a recording stub in tests.
 */

import type { SceneState } from "./geometry.js";

export interface Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface RenderOptions {
  width: number;
  height: number;
  /** countdown seconds remaining, null once the go signal fired */
  countdown?: number | null;
  feedback?: string;
}

const COLORS = {
  background: "#111318",
  startZone: "#3b4252",
  target: "#a3be8c",
  tunnel: "#4c566a",
  centerline: "#81a1c1",
  lane: "#2e3440",
  note: "#ebcb8b",
  text: "#eceff4",
  error: "#bf616a",
};

export function renderScene(ctx: Draw2D, scene: SceneState, options: RenderOptions): void {
  ctx.clearRect(0, 0, options.width, options.height);
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, options.width, options.height);

  switch (scene.kind) {
    case "acquisition": {
      ctx.fillStyle = COLORS.startZone;
      ctx.fillRect(scene.startZone.x, scene.startZone.y, scene.startZone.width, scene.startZone.height);
      ctx.fillStyle = COLORS.target;
      ctx.fillRect(scene.target.x, scene.target.y, scene.target.width, scene.target.height);
      break;
    }
    case "steering": {
      ctx.fillStyle = COLORS.tunnel;
      ctx.beginPath();
      scene.tunnel.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
      ctx.closePath();
      ctx.fill();
      ctx.strokeStyle = COLORS.centerline;
      ctx.lineWidth = 1;
      ctx.beginPath();
      scene.centerline.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
      ctx.stroke();
      break;
    }
    case "pitch-lane": {
      ctx.fillStyle = COLORS.lane;
      for (const lane of scene.lanes) {
        ctx.fillRect(0, lane.y - 5, options.width, 10);
      }
      ctx.fillStyle = COLORS.note;
      for (const note of scene.notes) {
        ctx.beginPath();
        ctx.arc(note.x, note.y, 5, 0, 2 * Math.PI);
        ctx.fill();
      }
      break;
    }
    case "error": {
      ctx.fillStyle = COLORS.error;
      ctx.font = "16px monospace";
      ctx.fillText(`cannot present trial: ${scene.reason}`, 20, options.height / 2);
      break;
    }
  }

  ctx.fillStyle = COLORS.text;
  ctx.font = "14px monospace";
  if (options.countdown != null && options.countdown > 0) {
    ctx.fillText(`go in ${options.countdown.toFixed(0)}...`, 20, 24);
  } else if (options.countdown === 0 || options.countdown === null) {
    ctx.fillText("go!", 20, 24);
  }
  if (options.feedback) {
    ctx.fillText(options.feedback, 20, options.height - 12);
  }
}
