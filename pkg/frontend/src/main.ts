/**
 * Browser entry point: connect to the gateway (through a WebSocket bridge
 * in front of its TCP port), present each planned trial on a canvas,
 * capture pointer and instrument input, and stream the trial messages.
 *
 * Input sources: pointer events for acquisition and steering trials,
 * Web MIDI note events where the browser exposes an instrument, keyboard
 * (space bar) as the rhythm-tap fallback. The units-to-pixels scale is
 * fixed per session and sent nowhere: samples carry device units.
 */

import { CaptureSession } from "./capture.js";
import { GatewayClient } from "./client.js";
import { presentTrial, type SceneState, type Viewport } from "./geometry.js";
import { MetronomeScheduler } from "./metronome.js";
import { FeedbackTone, midiToHz, webAudioSink } from "./pitch.js";
import { trialId, type PlanDocument, type TrialDocument } from "./protocol.js";
import { renderScene } from "./scene.js";
import { WebSocketTransport } from "./transport.js";

const VIEW: Viewport = { scale: 4, origin: { x: 80, y: 200 } };
const COUNTDOWN_S = 2;

interface UiState {
  client: GatewayClient | null;
  plan: PlanDocument | null;
  trialIndex: number;
  capture: CaptureSession | null;
  scene: SceneState | null;
  audio: AudioContext | null;
  metronome: MetronomeScheduler | null;
}

const state: UiState = {
  client: null,
  plan: null,
  trialIndex: 0,
  capture: null,
  scene: null,
  audio: null,
  metronome: null,
};

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function draw(feedback = ""): void {
  const canvas = byId<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d");
  if (!ctx || !state.scene) return;
  renderScene(ctx, state.scene, {
    width: canvas.width,
    height: canvas.height,
    countdown: null,
    feedback,
  });
}

function clockNow(): number {
  return state.audio ? state.audio.currentTime : performance.now() / 1000;
}

async function connect(): Promise<void> {
  const url = byId<HTMLInputElement>("gateway-url").value;
  const socket = new WebSocket(url);
  await new Promise<void>((resolve, reject) => {
    socket.onopen = () => resolve();
    socket.onerror = () => reject(new Error(`cannot reach ${url}`));
  });
  const client = new GatewayClient(new WebSocketTransport(socket));
  const plan = await client.hello();
  state.client = client;
  state.plan = plan.payload.plan;
  state.trialIndex = 0;
  byId<HTMLElement>("status").textContent =
    `connected: ${plan.payload.plan.trials.length} trials for ${plan.payload.device.name}`;
  nextTrial();
}

function nextTrial(): void {
  if (!state.plan || !state.client) return;
  state.metronome?.stop();
  if (state.trialIndex >= state.plan.trials.length) {
    byId<HTMLElement>("status").textContent = "battery complete";
    state.scene = null;
    return;
  }
  const task = state.plan.trials[state.trialIndex]!;
  state.scene = presentTrial(task, VIEW);
  const capture = new CaptureSession(
    trialId(state.trialIndex),
    { now: clockNow },
    (message) => state.client!.send(message),
  );
  state.capture = capture;

  if (state.scene.kind === "error") {
    // unknown task kind: show the error screen and skip the trial aborted
    capture.start();
    capture.abort();
    draw();
    state.trialIndex += 1;
    setTimeout(nextTrial, 500);
    return;
  }

  let remaining = COUNTDOWN_S;
  const countdown = setInterval(() => {
    remaining -= 1;
    if (remaining <= 0) {
      clearInterval(countdown);
      capture.start();
      startMetronome(task);
    }
    draw(remaining > 0 ? `starting in ${remaining}` : "");
  }, 1000);
  draw(`starting in ${remaining}`);
}

function startMetronome(task: TrialDocument): void {
  if (task.type !== "musical" || task.tempo === null || !state.audio) return;
  const scheduler = new MetronomeScheduler(state.audio, { bpm: task.tempo });
  const sink = webAudioSink(state.audio);
  scheduler.start((_, time) => {
    const delay = Math.max(0, time - state.audio!.currentTime);
    setTimeout(() => sink.play(880, 0.03), delay * 1000);
  });
  state.metronome = scheduler;
}

function finishTrial(completed: boolean): void {
  if (!state.capture || !state.client) return;
  if (state.capture.isOpen) {
    if (completed) state.capture.end(true);
    else state.capture.abort();
  }
  const id = trialId(state.trialIndex);
  state.client.ackFor(id).then((ack) => {
    byId<HTMLElement>("status").textContent = `${id} done: ${JSON.stringify(ack.metrics)}`;
  });
  state.trialIndex += 1;
  nextTrial();
}

function wirePointer(canvas: HTMLCanvasElement): void {
  canvas.addEventListener("pointermove", (event) => {
    if (!state.capture?.isOpen || !state.scene) return;
    const rect = canvas.getBoundingClientRect();
    const x = (event.clientX - rect.left - VIEW.origin!.x) / VIEW.scale;
    const y = (event.clientY - rect.top - VIEW.origin!.y) / VIEW.scale;
    if (state.scene.kind === "steering") state.capture.sample([x, y]);
    else state.capture.sample([x]);
  });
  canvas.addEventListener("pointerdown", (event) => {
    if (!state.capture?.isOpen || state.scene?.kind !== "acquisition") return;
    const rect = canvas.getBoundingClientRect();
    const x = (event.clientX - rect.left - VIEW.origin!.x) / VIEW.scale;
    state.capture.selection(x);
    finishTrial(true);
  });
}

function wireMidi(): void {
  if (!("requestMIDIAccess" in navigator)) return;
  navigator.requestMIDIAccess().then((access) => {
    for (const input of access.inputs.values()) {
      input.onmidimessage = (event: MIDIMessageEvent) => {
        const data = event.data;
        if (!data || data.length < 3 || !state.capture?.isOpen) return;
        const [status, note, velocity] = [data[0]!, data[1]!, data[2]!];
        const command = status & 0xf0;
        if (command === 0x90 && velocity > 0) {
          state.capture.noteOn(note, velocity);
          if (state.audio) {
            new FeedbackTone(webAudioSink(state.audio)).feedback(midiToHz(note), midiToHz(note));
          }
        } else if (command === 0x80 || (command === 0x90 && velocity === 0)) {
          state.capture.noteOff(note);
        }
      };
    }
  });
}

function wireKeyboard(): void {
  window.addEventListener("keydown", (event) => {
    if (!state.capture?.isOpen) return;
    if (event.code === "Space") {
      state.capture.noteOn(60, 100);
    } else if (event.code === "Enter") {
      finishTrial(true);
    } else if (event.code === "Escape") {
      finishTrial(false);
    }
  });
  window.addEventListener("keyup", (event) => {
    if (state.capture?.isOpen && event.code === "Space") {
      state.capture.noteOff(60);
    }
  });
}

export function boot(): void {
  const canvas = byId<HTMLCanvasElement>("scene");
  byId<HTMLButtonElement>("connect").addEventListener("click", () => {
    state.audio = state.audio ?? new AudioContext();
    connect().catch((err) => {
      byId<HTMLElement>("status").textContent = String(err);
    });
  });
  window.addEventListener("beforeunload", () => {
    // a vanished performer must leave an aborted trial, not a hung one
    state.capture?.abort();
    state.client?.close();
  });
  wirePointer(canvas);
  wireMidi();
  wireKeyboard();
}

if (typeof document !== "undefined" && document.getElementById("scene")) {
  boot();
}
