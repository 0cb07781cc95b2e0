/** Wires the session store, keyboard steering, haptic bars, and the
 * post-run reveal into the page. */

import { HapticBars, AudioClicker } from "./bars.js";
import { KeyboardSteering } from "./input.js";
import { Session } from "./session.js";
import { drawReveal, metricsLine } from "./reveal.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const session = new Session();
const steering = new KeyboardSteering();
const bars = new HapticBars(el("bars"));
const clicker = new AudioClicker();

const statusLine = el("status");
const tickLine = el("tick");
const revealCanvas = el<HTMLCanvasElement>("reveal-canvas");
const revealMetrics = el("reveal-metrics");
const revealButton = el<HTMLButtonElement>("reveal-button");
const connectButton = el<HTMLButtonElement>("connect-button");
const audioButton = el<HTMLButtonElement>("audio-button");

let lastTickTime = performance.now();

session.onChange(() => {
  const view = session.midRunView();
  bars.update(view.haptic);
  tickLine.textContent = view.tick >= 0 ? `tick ${view.tick}` : "";
  statusLine.textContent =
    session.errorReason !== null && view.connection === "aborted"
      ? `aborted: ${session.errorReason}`
      : view.connection;
  const now = performance.now();
  clicker.step(view.haptic, (now - lastTickTime) / 1000);
  lastTickTime = now;

  revealButton.disabled = view.connection !== "finished";
  if (session.done && view.connection === "finished") {
    const m = session.done.metrics;
    statusLine.textContent = `finished: ${m.seconds.toFixed(1)} s, ${m.collisions} collisions`;
  }
  if (session.reveal && view.connection === "revealed") {
    revealCanvas.hidden = false;
    drawReveal(revealCanvas, session.reveal);
    revealMetrics.textContent = metricsLine(session.reveal);
  }
});

steering.attach(window, (action) => session.setDesiredAction(action));

connectButton.addEventListener("click", () => {
  const course = Number((el<HTMLInputElement>("course-input")).value) || 1;
  const seed = Number((el<HTMLInputElement>("seed-input")).value) || 0;
  const proto = location.protocol === "https:" ? "wss" : "ws";
  const ws = new WebSocket(`${proto}://${location.host}/session`);
  ws.onmessage = (event) => session.handleMessage(String(event.data));
  ws.onclose = () => session.handleDisconnect();
  revealCanvas.hidden = true;
  revealMetrics.textContent = "";
  ws.onopen = () => session.start(ws, course, seed, true);
});

revealButton.addEventListener("click", () => session.requestReveal());
audioButton.addEventListener("click", () => {
  audioButton.textContent = clicker.toggle() ? "audio: on" : "audio: off";
});
