/** Browser entry point: socket client, canvas arena, glove widget, params.
 *
 * All simulation state comes from the server; this file only wires DOM
 * events to ClientMessages and the latest ServerMessages to pixels.
 * Rendering runs on an animation-frame loop decoupled from message
 * arrival, so a burst of frames costs one repaint.
 */

import {
  PARAM_NAMES,
  parseServerMessage,
  type ClientMessage,
  type ParamName,
  type StateMessage,
  type TactileFrame,
} from "./protocol.js";
import { pointerToHand, RateLimiter } from "./input.js";
import {
  acceptState,
  buildViewModel,
  gloveFromFrame,
  worldToScreen,
  type Viewport,
  type ViewModel,
} from "./viewmodel.js";

const VIEWPORT: Viewport = {
  widthPx: 720,
  heightPx: 540,
  pxPerMeter: 60,
  arenaHalfM: 4.0,
};

// Slider ranges centered on the stock parameter values.
const PARAM_RANGES: Record<ParamName, { min: number; max: number; step: number }> = {
  M_d: { min: 0.1, max: 5, step: 0.1 },
  D_d: { min: 0, max: 40, step: 0.2 },
  K_d: { min: 1, max: 60, step: 0.5 },
  K_v: { min: -20, max: 0, step: 0.5 },
  x_imp_limit: { min: 0.05, max: 1, step: 0.05 },
  W: { min: 0.1, max: 2, step: 0.05 },
  L_1: { min: 0.1, max: 2, step: 0.05 },
  L_2: { min: 0.1, max: 2, step: 0.05 },
  L_3: { min: 0.1, max: 2, step: 0.05 },
  L_4: { min: 0.1, max: 2, step: 0.05 },
};

interface Store {
  state: StateMessage | null;
  gloveFrame: TactileFrame | null;
  connected: boolean;
  roleBlocked: boolean;
  lastError: string;
}

const store: Store = {
  state: null,
  gloveFrame: null,
  connected: false,
  roleBlocked: false,
  lastError: "",
};

let socket: WebSocket | null = null;

function serverUrl(): string {
  const q = new URLSearchParams(window.location.search).get("server");
  return q ?? "ws://127.0.0.1:8765";
}

function send(message: ClientMessage): void {
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(JSON.stringify(message));
  }
}

function connect(): void {
  const ws = new WebSocket(serverUrl());
  socket = ws;
  ws.onopen = () => {
    store.connected = true;
    store.roleBlocked = false;
    store.lastError = "";
  };
  ws.onmessage = (ev) => {
    let msg;
    try {
      msg = parseServerMessage(String(ev.data));
    } catch {
      return; // not ours to render
    }
    if (msg.type === "state") {
      const prev = store.state;
      store.state = acceptState(prev, msg);
      if (store.state === msg) store.gloveFrame = msg.frame;
    } else if (msg.type === "tactile") {
      store.gloveFrame = msg;
    } else {
      store.lastError = msg.reason;
      if (msg.reason === "hand role is held") store.roleBlocked = true;
    }
  };
  ws.onclose = () => {
    store.connected = false;
    socket = null;
    window.setTimeout(connect, 1000);
  };
}

// -- DOM scaffold -------------------------------------------------------

const root = document.getElementById("app")!;
root.innerHTML = `
  <div class="layout">
    <canvas id="arena" width="${VIEWPORT.widthPx}" height="${VIEWPORT.heightPx}"></canvas>
    <div class="panel">
      <div id="conn" class="strip"></div>
      <div id="status" class="strip"></div>
      <div id="role" class="strip warn"></div>
      <div id="errors" class="strip warn"></div>
      <div class="glove" id="glove">
        ${[1, 2, 3, 4, 5].map((i) => `
          <div class="finger">
            <div class="pad" id="finger-${i}"></div>
            <div class="freq" id="freq-${i}"></div>
          </div>`).join("")}
      </div>
      <div class="buttons">
        <button id="btn-pause">pause</button>
        <button id="btn-resume">resume</button>
        <button id="btn-reset">reset</button>
      </div>
      <div id="params" class="params"></div>
    </div>
  </div>
`;

const canvas = document.getElementById("arena") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const connEl = document.getElementById("conn")!;
const statusEl = document.getElementById("status")!;
const roleEl = document.getElementById("role")!;
const errorsEl = document.getElementById("errors")!;
const paramsEl = document.getElementById("params")!;

document.getElementById("btn-pause")!.onclick = () => send({ type: "command", name: "pause" });
document.getElementById("btn-resume")!.onclick = () => send({ type: "command", name: "resume" });
document.getElementById("btn-reset")!.onclick = () => send({ type: "command", name: "reset" });

const sliders = new Map<ParamName, { input: HTMLInputElement; label: HTMLElement }>();
for (const name of PARAM_NAMES) {
  const range = PARAM_RANGES[name];
  const row = document.createElement("div");
  row.className = "param-row";
  const label = document.createElement("span");
  label.textContent = name;
  const value = document.createElement("span");
  value.className = "param-value";
  const input = document.createElement("input");
  input.type = "range";
  input.min = String(range.min);
  input.max = String(range.max);
  input.step = String(range.step);
  input.onchange = () => {
    send({ type: "command", name: "set_param", param: name, value: Number(input.value) });
  };
  row.append(label, input, value);
  paramsEl.append(row);
  sliders.set(name, { input, label: value });
}

// -- pointer input ------------------------------------------------------

const limiter = new RateLimiter(80);
let dragging = false;

canvas.addEventListener("pointerdown", (ev) => {
  dragging = true;
  store.roleBlocked = false; // retry the role on a fresh grab
  canvas.setPointerCapture(ev.pointerId);
  forwardPointer(ev);
});
canvas.addEventListener("pointermove", (ev) => {
  if (dragging) forwardPointer(ev);
});
canvas.addEventListener("pointerup", () => {
  dragging = false;
});

function forwardPointer(ev: PointerEvent): void {
  if (store.roleBlocked) return;
  if (!limiter.accept(ev.timeStamp)) return;
  const rect = canvas.getBoundingClientRect();
  send(pointerToHand(
    { xPx: ev.clientX - rect.left, yPx: ev.clientY - rect.top, tMs: ev.timeStamp },
    VIEWPORT,
  ));
}

// -- rendering ----------------------------------------------------------

function drawArena(vm: ViewModel): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  // meter grid
  ctx.strokeStyle = "#eceff1";
  ctx.lineWidth = 1;
  const half = Math.ceil(canvas.width / 2 / VIEWPORT.pxPerMeter);
  for (let m = -half; m <= half; m++) {
    const { x } = worldToScreen([m, 0, 0], VIEWPORT);
    const { y } = worldToScreen([0, m, 0], VIEWPORT);
    ctx.beginPath(); ctx.moveTo(x, 0); ctx.lineTo(x, canvas.height); ctx.stroke();
    ctx.beginPath(); ctx.moveTo(0, y); ctx.lineTo(canvas.width, y); ctx.stroke();
  }

  // arena bounds (hand input clamps here)
  const tl = worldToScreen([-VIEWPORT.arenaHalfM, VIEWPORT.arenaHalfM, 0], VIEWPORT);
  const br = worldToScreen([VIEWPORT.arenaHalfM, -VIEWPORT.arenaHalfM, 0], VIEWPORT);
  ctx.strokeStyle = "#b0bec5";
  ctx.setLineDash([6, 4]);
  ctx.strokeRect(tl.x, tl.y, br.x - tl.x, br.y - tl.y);
  ctx.setLineDash([]);

  // links under everything else
  for (const link of vm.links) {
    ctx.strokeStyle = link.color;
    ctx.lineWidth = 2 + 3 * link.load;
    ctx.beginPath();
    ctx.moveTo(link.from.x, link.from.y);
    ctx.lineTo(link.to.x, link.to.y);
    ctx.stroke();
  }

  // goal ghosts
  for (const d of vm.drones) {
    ctx.strokeStyle = "#90a4ae";
    ctx.setLineDash([3, 3]);
    ctx.beginPath();
    ctx.arc(d.goalX, d.goalY, 9, 0, Math.PI * 2);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  // drones
  for (const d of vm.drones) {
    ctx.fillStyle = "#1565c0";
    ctx.beginPath();
    ctx.arc(d.x, d.y, 9, 0, Math.PI * 2);
    ctx.fill();
    ctx.fillStyle = "#ffffff";
    ctx.font = "10px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(String(d.id), d.x, d.y);
    ctx.fillStyle = "#455a64";
    ctx.textAlign = "left";
    ctx.fillText(`${d.altitudeM.toFixed(2)} m`, d.x + 12, d.y - 10);
  }

  // hand cursor
  ctx.strokeStyle = "#e65100";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(vm.hand.x, vm.hand.y, 12, 0, Math.PI * 2);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(vm.hand.x - 16, vm.hand.y); ctx.lineTo(vm.hand.x + 16, vm.hand.y);
  ctx.moveTo(vm.hand.x, vm.hand.y - 16); ctx.lineTo(vm.hand.x, vm.hand.y + 16);
  ctx.stroke();
}

function render(): void {
  connEl.textContent = store.connected ? `connected to ${serverUrl()}` : "connecting...";
  roleEl.textContent = store.roleBlocked ? "hand role held by another client" : "";
  roleEl.style.display = store.roleBlocked ? "block" : "none";
  errorsEl.textContent = store.lastError && !store.roleBlocked ? store.lastError : "";
  errorsEl.style.display = errorsEl.textContent ? "block" : "none";

  if (store.state) {
    const vm = buildViewModel(store.state, VIEWPORT);
    vm.glove = gloveFromFrame(store.gloveFrame);
    drawArena(vm);
    const s = vm.status;
    statusEl.textContent =
      `tick ${s.tick}  t=${s.tS.toFixed(2)} s${s.paused ? "  PAUSED" : ""}  ` +
      `spread ${s.spreadRatio.toFixed(2)}  ${s.shapeClass}/${s.rateClass}  ` +
      `pattern ${s.pattern}  hand alt ${vm.hand.altitudeM.toFixed(2)} m`;
    for (let i = 0; i < 5; i++) {
      const pad = document.getElementById(`finger-${i + 1}`)!;
      const freq = document.getElementById(`freq-${i + 1}`)!;
      const finger = vm.glove[i]!;
      pad.style.background = finger.fill;
      freq.textContent = finger.freqHz > 0 ? `${finger.freqHz} Hz` : "";
    }
    for (const [name, widgets] of sliders) {
      const live = vm.params[name];
      widgets.label.textContent = String(live);
      if (document.activeElement !== widgets.input) {
        widgets.input.value = String(live);
      }
    }
  }
  window.requestAnimationFrame(render);
}

connect();
window.requestAnimationFrame(render);
