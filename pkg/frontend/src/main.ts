// DOM wiring for the console: connects the service client, the virtual
// stylus and the renderer to the page. Everything interesting happens in
// the other modules; this file only shovels events.

import { ServiceClient } from "./client.js";
import { render, type Scene, type ViewParams } from "./render.js";
import { SessionRecorder, downloadText } from "./record.js";
import { VirtualStylus } from "./stylus.js";
import { resetCommand, setCaseCommand, setScaleCommand } from "./protocol.js";
import type { DrawCmd } from "./render.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

const el = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;
const urlInput = el<HTMLInputElement>("url");
const connectBtn = el<HTMLButtonElement>("connect");
const clutchBtn = el<HTMLButtonElement>("clutch");
const resetBtn = el<HTMLButtonElement>("reset");
const scaleInput = el<HTMLInputElement>("scale");
const pxInput = el<HTMLInputElement>("pxm");
const recordBtn = el<HTMLButtonElement>("record");
const saveBtn = el<HTMLButtonElement>("save");
const statusSpan = el<HTMLSpanElement>("status");

const recorder = new SessionRecorder();
const view: ViewParams = { yaw: 0.5, pitch: 0.9, zoom: 900 };

const client = new ServiceClient({
  onRawLine: (line) => recorder.add(line),
  onClose: () => {
    stylus.setEnabled(false);
    statusSpan.textContent = "disconnected";
    clutchBtn.textContent = "clutch (space)";
  },
  onHello: () => {
    stylus.setEnabled(true);
    statusSpan.textContent = "connected";
  },
  onError: (m) => {
    statusSpan.textContent = `service error: ${m}`;
  },
});

const stylus = new VirtualStylus((msg) => client.send(msg));

connectBtn.onclick = () => client.connect(urlInput.value);
resetBtn.onclick = () => client.send(resetCommand());
scaleInput.onchange = () => {
  const s = Number(scaleInput.value);
  if (s > 0 && s <= 10) client.send(setScaleCommand(s));
};
const pxReadout = el<HTMLSpanElement>("pxmv");
pxInput.oninput = () => {
  const v = Number(pxInput.value);
  if (v > 0) {
    stylus.cfg.pxToM = v;
    pxReadout.textContent = v.toFixed(5);
  }
};
for (const c of [0, 1, 2]) {
  el<HTMLInputElement>(`case${c}`).onchange = () => client.send(setCaseCommand(c));
}

function toggleClutch() {
  if (stylus.clutched) {
    stylus.release();
    clutchBtn.textContent = "clutch (space)";
  } else {
    stylus.engage(performance.now());
    if (stylus.clutched) clutchBtn.textContent = "release (space)";
  }
}
clutchBtn.onclick = toggleClutch;
window.addEventListener("keydown", (ev) => {
  if (ev.code === "Space" && ev.target === document.body) {
    ev.preventDefault();
    toggleClutch();
  }
});

recordBtn.onclick = () => {
  recorder.recording = !recorder.recording;
  recordBtn.textContent = recorder.recording ? "recording..." : "record";
};
saveBtn.onclick = () => {
  if (recorder.count > 0) downloadText("session.ndjson", recorder.toText());
};

// pointer input: plain drag translates the stylus, shift-drag rotates it,
// alt/ctrl-drag orbits the camera, wheel = depth (with ctrl: view zoom)
let dragging = false;
let lastX = 0, lastY = 0;
canvas.addEventListener("pointerdown", (ev) => {
  dragging = true;
  lastX = ev.offsetX;
  lastY = ev.offsetY;
  canvas.setPointerCapture(ev.pointerId);
});
canvas.addEventListener("pointermove", (ev) => {
  if (!dragging) return;
  const cx = canvas.width / 2, cy = canvas.height / 2;
  if (ev.altKey || ev.ctrlKey) {
    view.yaw += (ev.offsetX - lastX) * 0.01;
    view.pitch = Math.min(1.5, Math.max(-1.5, view.pitch + (ev.offsetY - lastY) * 0.01));
  } else if (ev.shiftKey) {
    stylus.rotate(lastX - cx, lastY - cy, ev.offsetX - cx, ev.offsetY - cy);
  } else {
    stylus.translate(ev.offsetX - lastX, ev.offsetY - lastY);
  }
  lastX = ev.offsetX;
  lastY = ev.offsetY;
});
canvas.addEventListener("pointerup", () => {
  dragging = false;
});
canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  if (ev.ctrlKey) {
    view.zoom = Math.min(20000, Math.max(100, view.zoom * Math.exp(-ev.deltaY * 0.001)));
  } else {
    stylus.depth(ev.deltaY);
  }
}, { passive: false });

function paint(cmds: DrawCmd[]) {
  for (const c of cmds) {
    switch (c.op) {
      case "clear":
        ctx.fillStyle = c.color;
        ctx.fillRect(0, 0, canvas.width, canvas.height);
        break;
      case "line":
        ctx.strokeStyle = c.color;
        ctx.lineWidth = c.w;
        ctx.beginPath();
        ctx.moveTo(c.x1, c.y1);
        ctx.lineTo(c.x2, c.y2);
        ctx.stroke();
        break;
      case "poly":
        ctx.strokeStyle = c.color;
        ctx.lineWidth = c.w;
        ctx.beginPath();
        ctx.moveTo(c.pts[0], c.pts[1]);
        for (let i = 2; i < c.pts.length; i += 2) ctx.lineTo(c.pts[i], c.pts[i + 1]);
        ctx.stroke();
        break;
      case "dot":
        ctx.fillStyle = c.color;
        ctx.beginPath();
        ctx.arc(c.x, c.y, c.r, 0, 2 * Math.PI);
        ctx.fill();
        break;
      case "text":
        ctx.fillStyle = c.color;
        ctx.font = `${c.size}px system-ui, sans-serif`;
        ctx.fillText(c.s, c.x, c.y);
        break;
    }
  }
}

function frameLoop(nowMs: number) {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  stylus.flush(nowMs);
  const scene: Scene = {
    hello: client.hello,
    frame: client.state,
    history: client.history,
    connected: client.connected,
    dropped: client.dropped,
    width: canvas.width,
    height: canvas.height,
    view,
  };
  paint(render(scene));
  requestAnimationFrame(frameLoop);
}
requestAnimationFrame(frameLoop);

urlInput.value = `ws://${location.host || "127.0.0.1:8765"}/`;
