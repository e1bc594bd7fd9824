// Interactive demo: drag the slider handle or trace a shape against the
// live engine. The mouse moves the hand, holding the left button pinches,
// and holding F (or scrolling) squeezes harder; the dot shrinks as the
// server-reported tracking speed drops.

import { SessionClient } from "./client.js";
import { ForceProxy } from "./forceProxy.js";
import { ServerMsg, StartTaskMsg, StateMsg, SummaryMsg } from "./protocol.js";
import {
  fitViewport,
  sliderOffset,
  SLIDER_LENGTH,
  toMeters,
  toPixels,
  TRACE_EXTENT,
  Viewport,
} from "./viewport.js";

interface TaskInfo {
  kind: "slider" | "trace";
  target_value?: number;
  length?: number;
  polyline?: [number, number][];
}

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const taskSel = document.getElementById("task") as HTMLSelectElement;
const shapeSel = document.getElementById("shape") as HTMLSelectElement;
const techniqueSel = document.getElementById("technique") as HTMLSelectElement;
const gainInput = document.getElementById("gain") as HTMLInputElement;
const seedInput = document.getElementById("seed") as HTMLInputElement;
const startBtn = document.getElementById("start") as HTMLButtonElement;
const endBtn = document.getElementById("end") as HTMLButtonElement;
const banner = document.getElementById("banner")!;
const readout = document.getElementById("readout")!;
const summaryPanel = document.getElementById("summary")!;

const force = new ForceProxy();
let client: SessionClient | null = null;
let running = false;
let task: TaskInfo | null = null;
let state: StateMsg | null = null;
let pointerPx: [number, number] = [0, 0];
let pinching = false;
let trail: [number, number][] = [];
let lastFrame = performance.now();

const wsUrl = `ws://${location.host}/ws`;

function viewport(): Viewport {
  const extent = task?.kind === "slider" ? SLIDER_LENGTH * 1.2 : TRACE_EXTENT * 1.2;
  return fitViewport(canvas.width, canvas.height, extent);
}

function connect() {
  client = new SessionClient(wsUrl, {
    onMessage: handleMessage,
    onOpen: () => {
      banner.textContent = "connected";
      banner.className = "ok";
      startBtn.disabled = false;
    },
    onClose: () => {
      banner.textContent = "disconnected — reload to retry";
      banner.className = "bad";
      startBtn.disabled = true;
      endBtn.disabled = true;
      running = false;
    },
  });
}

function handleMessage(msg: ServerMsg) {
  if (msg.type === "state") {
    state = msg;
    const withTask = msg as StateMsg & { task?: TaskInfo };
    if (withTask.task) task = withTask.task;
    if (running && pinching) trail.push(msg.object);
  } else if (msg.type === "summary") {
    showSummary(msg);
    running = false;
    endBtn.disabled = true;
    startBtn.disabled = false;
  } else {
    banner.textContent = `server error: ${msg.msg}`;
    banner.className = "bad";
  }
}

function showSummary(m: SummaryMsg) {
  const rows: [string, string][] = [
    ["error distance", `${m.error_distance.toPrecision(4)} m`],
    ["operation time", `${m.operation_time.toFixed(2)} s`],
    ["operations", String(m.num_operations)],
    ["hand travel", `${m.hand_travel.toPrecision(4)} m`],
    ["object travel", `${m.object_travel.toPrecision(4)} m`],
    ["overshoots", String(m.overshoot_count)],
  ];
  if (m.error_path_mean !== null) {
    rows.splice(1, 0, ["path error (mean)", `${m.error_path_mean.toPrecision(4)} m`]);
  }
  summaryPanel.innerHTML =
    "<h3>trial summary</h3>" +
    rows.map(([k, v]) => `<div><span>${k}</span><b>${v}</b></div>`).join("");
  summaryPanel.classList.remove("hidden");
}

function startTask() {
  if (!client?.ready) return;
  summaryPanel.classList.add("hidden");
  trail = [];
  task = null;
  state = null;
  running = true;
  endBtn.disabled = false;
  startBtn.disabled = true;
  client.send({
    type: "start_task",
    task: taskSel.value as "slider" | "trace",
    technique: techniqueSel.value as StartTaskMsg["technique"],
    c: Number(gainInput.value) || 0.5,
    seed: Number(seedInput.value) || 0,
    shape: shapeSel.value,
  });
}

function endTask() {
  if (!client?.ready || !running) return;
  client.send({ type: "end_task" });
}

function frame(now: number) {
  const dt = Math.min(0.1, (now - lastFrame) / 1000);
  lastFrame = now;
  force.update(dt);
  if (running && client?.ready) {
    const vp = viewport();
    let [mx, my] = toMeters(vp, pointerPx[0], pointerPx[1]);
    if (task?.kind === "slider") mx -= sliderOffset;
    client.send({
      type: "input",
      t: now / 1000,
      pos: [mx, my],
      force: force.value,
      pinch: pinching,
    });
  }
  draw();
  requestAnimationFrame(frame);
}

function draw() {
  const vp = viewport();
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (task?.kind === "slider") drawSlider(vp);
  else if (task?.kind === "trace") drawTrace(vp);
  if (state) drawPointer(vp);
  readout.textContent = state
    ? `force ${force.value.toFixed(2)}  speed ${state.speed.toFixed(3)}`
    : `force ${force.value.toFixed(2)}`;
}

function drawSlider(vp: Viewport) {
  const y = 0;
  const [x0, y0] = toPixels(vp, sliderOffset, y);
  const [x1] = toPixels(vp, sliderOffset + (task?.length ?? SLIDER_LENGTH), y);
  ctx.strokeStyle = "#555";
  ctx.lineWidth = 4;
  ctx.beginPath();
  ctx.moveTo(x0, y0);
  ctx.lineTo(x1, y0);
  ctx.stroke();
  if (task?.target_value !== undefined) {
    const tx = sliderOffset + task.target_value * (task.length ?? SLIDER_LENGTH);
    const [px, py] = toPixels(vp, tx, y);
    ctx.strokeStyle = "#2a9d8f";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(px, py - 18);
    ctx.lineTo(px, py + 18);
    ctx.stroke();
  }
  if (state) {
    const hx = sliderOffset + state.object[0];
    const [px, py] = toPixels(vp, hx, y);
    ctx.fillStyle = "#e9c46a";
    ctx.fillRect(px - 5, py - 14, 10, 28);
  }
}

function drawTrace(vp: Viewport) {
  if (task?.polyline) {
    ctx.strokeStyle = "#555";
    ctx.lineWidth = 2;
    ctx.beginPath();
    task.polyline.forEach(([x, y], i) => {
      const [px, py] = toPixels(vp, x, y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
  if (trail.length > 1) {
    ctx.strokeStyle = "#e76f51";
    ctx.lineWidth = 2;
    ctx.beginPath();
    trail.forEach(([x, y], i) => {
      const [px, py] = toPixels(vp, x, y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
}

function drawPointer(vp: Viewport) {
  if (!state) return;
  let [ox, oy] = state.object;
  if (task?.kind === "slider") {
    ox = sliderOffset + ox;
    oy = 0;
  }
  const [px, py] = toPixels(vp, ox, oy);
  const radiusPx = Math.max(2, state.cursor_radius * vp.scale);
  ctx.fillStyle = pinching ? "rgba(231,111,81,0.85)" : "rgba(120,120,220,0.7)";
  ctx.beginPath();
  ctx.arc(px, py, radiusPx, 0, Math.PI * 2);
  ctx.fill();
}

canvas.addEventListener("mousemove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  pointerPx = [ev.clientX - rect.left, ev.clientY - rect.top];
});
canvas.addEventListener("mousedown", () => (pinching = true));
window.addEventListener("mouseup", () => (pinching = false));
window.addEventListener("keydown", (ev) => {
  if (ev.key === "f" || ev.key === " ") {
    force.holding = true;
    ev.preventDefault();
  }
});
window.addEventListener("keyup", (ev) => {
  if (ev.key === "f" || ev.key === " ") force.holding = false;
});
canvas.addEventListener("wheel", (ev) => {
  force.wheel(ev.deltaY);
  ev.preventDefault();
});
taskSel.addEventListener("change", () => {
  shapeSel.disabled = taskSel.value !== "trace";
});
startBtn.addEventListener("click", startTask);
endBtn.addEventListener("click", endTask);

connect();
requestAnimationFrame(frame);
