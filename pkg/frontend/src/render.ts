// Rendering as a pure function: (model, frame history, view) -> a flat
// list of draw commands the DOM layer replays onto a canvas. Keeping the
// scene construction free of clocks and ambient state means the same
// inputs always produce the same command list, which is what makes the
// renderer testable and recorded sessions replay identically.

import type { HelloFrame, StateFrame, Vec3, WirePose } from "./protocol.js";
import { qRotate } from "./quat.js";
import { segmentArcWorld, skeletonPoints } from "./kinematics.js";

export interface ViewParams {
  yaw: number; // radians about world z
  pitch: number; // radians about the screen x axis after yaw
  zoom: number; // pixels per meter
}

export interface Scene {
  hello: HelloFrame | null;
  frame: StateFrame | null;
  history: StateFrame[]; // oldest first; charts and the tip trail read this
  connected: boolean;
  dropped: number; // malformed frames discarded by the client
  width: number;
  height: number;
  view: ViewParams;
}

export type DrawCmd =
  | { op: "clear"; color: string }
  | { op: "line"; x1: number; y1: number; x2: number; y2: number; color: string; w: number }
  | { op: "poly"; pts: number[]; color: string; w: number }
  | { op: "dot"; x: number; y: number; r: number; color: string }
  | { op: "text"; x: number; y: number; s: string; color: string; size: number };

const C = {
  bg: "#10141a",
  skeleton: "#7f9cb8",
  joint: "#b8cde0",
  segment: "#e8a33d",
  trocar: "#e05555",
  tip: ["#ff5f5f", "#58d858", "#5f8fff"], // frame triad x, y, z
  ghost: "#8f72d8",
  trail: "#3e5b78",
  hud: "#d6dde6",
  dim: "#6b7685",
  chart: "#58a6d8",
  ref: "#888888",
  warn: "#e0b020",
};

export const CASE_LABELS = ["case 0 (stacked)", "case 1 (position first)", "case 2 (orientation first)"];

const CHART_H = 150;

interface Projector {
  (p: Vec3): [number, number];
}

function makeProjector(scene: Scene, center: Vec3): Projector {
  const { yaw, pitch, zoom } = scene.view;
  const cy = Math.cos(yaw), sy = Math.sin(yaw);
  const cp = Math.cos(pitch), sp = Math.sin(pitch);
  const cx = scene.width / 2;
  const cyPx = (scene.height - CHART_H) / 2;
  return (p: Vec3) => {
    const x = p[0] - center[0], y = p[1] - center[1], z = p[2] - center[2];
    const rx = cy * x - sy * y;
    const ry = sy * x + cy * y;
    const rz = z;
    // pitch tilts the view so +z stays up on screen
    const sx = rx;
    const sz = cp * rz - sp * ry;
    return [cx + zoom * sx, cyPx - zoom * sz];
  };
}

function triad(cmds: DrawCmd[], proj: Projector, pose: WirePose, lenM: number, colors: string[], w: number): void {
  const o = pose.position;
  const axes: Vec3[] = [[lenM, 0, 0], [0, lenM, 0], [0, 0, lenM]];
  for (let i = 0; i < 3; i++) {
    const a = qRotate(pose.orientation, axes[i]);
    const [x1, y1] = proj(o);
    const [x2, y2] = proj([o[0] + a[0], o[1] + a[1], o[2] + a[2]]);
    cmds.push({ op: "line", x1, y1, x2, y2, color: colors[i], w });
  }
}

function chart(
  cmds: DrawCmd[],
  x: number, y: number, w: number, h: number,
  label: string, values: number[], refValue: number | null,
): void {
  cmds.push({ op: "line", x1: x, y1: y, x2: x, y2: y + h, color: C.dim, w: 1 });
  cmds.push({ op: "line", x1: x, y1: y + h, x2: x + w, y2: y + h, color: C.dim, w: 1 });
  let lo = Infinity, hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (refValue !== null) {
    if (refValue < lo) lo = refValue;
    if (refValue > hi) hi = refValue;
  }
  if (!(lo < hi)) {
    lo = lo === Infinity ? 0 : lo - 1;
    hi = lo + 2;
  }
  const pad = 0.1 * (hi - lo);
  lo -= pad;
  hi += pad;
  const toY = (v: number) => y + h - ((v - lo) / (hi - lo)) * h;
  if (refValue !== null) {
    const ry = toY(refValue);
    cmds.push({ op: "line", x1: x, y1: ry, x2: x + w, y2: ry, color: C.ref, w: 1 });
  }
  if (values.length > 1) {
    const pts: number[] = [];
    for (let i = 0; i < values.length; i++) {
      pts.push(x + (i / (values.length - 1)) * w, toY(values[i]));
    }
    cmds.push({ op: "poly", pts, color: C.chart, w: 1.5 });
  }
  const last = values.length ? values[values.length - 1] : 0;
  cmds.push({ op: "text", x, y: y - 6, s: `${label}  ${fmt(last)}`, color: C.hud, size: 12 });
}

function fmt(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a < 1e-3 || a >= 1e4)) return v.toExponential(2);
  return v.toPrecision(4);
}

function norm3(v: Vec3): number {
  return Math.hypot(v[0], v[1], v[2]);
}

export function render(scene: Scene): DrawCmd[] {
  const cmds: DrawCmd[] = [{ op: "clear", color: C.bg }];
  const hud = (line: number, s: string, color = C.hud) =>
    cmds.push({ op: "text", x: 12, y: 20 + 16 * line, s, color, size: 13 });

  if (!scene.connected || scene.hello === null) {
    hud(0, "disconnected", C.warn);
    return cmds;
  }
  const hello = scene.hello;
  const frame = scene.frame;
  const center: Vec3 = [hello.trocar[0], hello.trocar[1], hello.trocar[2]];
  const proj = makeProjector(scene, center);

  if (frame !== null) {
    // tip trail from history, oldest first
    const trail: number[] = [];
    for (const f of scene.history) {
      const [px, py] = proj(f.tip_pose.position);
      trail.push(px, py);
    }
    if (trail.length >= 4) cmds.push({ op: "poly", pts: trail, color: C.trail, w: 1 });

    const bones = skeletonPoints(frame.q_aug, hello.model);
    const pts: number[] = [];
    for (const p of bones) {
      const [px, py] = proj(p);
      pts.push(px, py);
    }
    cmds.push({ op: "poly", pts, color: C.skeleton, w: 2.5 });
    for (let i = 0; i < bones.length - 1; i++) {
      const [px, py] = proj(bones[i]);
      cmds.push({ op: "dot", x: px, y: py, r: 3, color: C.joint });
    }

    const arc: number[] = [];
    for (const p of segmentArcWorld(frame.q_aug, hello.model, 24)) {
      const [px, py] = proj(p);
      arc.push(px, py);
    }
    cmds.push({ op: "poly", pts: arc, color: C.segment, w: 3 });

    const [tx, ty] = proj(center);
    cmds.push({ op: "dot", x: tx, y: ty, r: 5, color: C.trocar });
    cmds.push({ op: "text", x: tx + 8, y: ty - 8, s: "trocar", color: C.trocar, size: 11 });

    triad(cmds, proj, frame.tip_pose, 0.012, C.tip, 2);
    if (frame.desired_pose !== null) {
      triad(cmds, proj, frame.desired_pose, 0.012, [C.ghost, C.ghost, C.ghost], 1);
    }

    hud(0, `t = ${frame.time.toFixed(3)} s`);
    hud(1, CASE_LABELS[frame.case]);
    hud(2, frame.clutched ? "clutched" : "clutch off", frame.clutched ? C.segment : C.dim);
    hud(3, `lambda ${frame.lambda.toFixed(4)} (setpoint ${hello.lam0})`);
    hud(4, `rcm error ${fmt(frame.rcm_error * 1e6)} um`);
    if (frame.desired_pose === null) hud(5, "no desired pose yet", C.dim);
  } else {
    hud(0, "waiting for state", C.dim);
  }
  if (scene.dropped > 0) hud(6, `dropped frames: ${scene.dropped}`, C.warn);

  const n = 4;
  const gap = 16;
  const cw = (scene.width - gap * (n + 1)) / n;
  const cy = scene.height - CHART_H + 24;
  const ch = CHART_H - 40;
  const hist = scene.history;
  chart(cmds, gap, cy, cw, ch, "|e_p| mm", hist.map((f) => norm3(f.e_p) * 1e3), null);
  chart(cmds, gap * 2 + cw, cy, cw, ch, "|e_o| mrad", hist.map((f) => norm3(f.e_o) * 1e3), null);
  chart(cmds, gap * 3 + cw * 2, cy, cw, ch, "rcm um", hist.map((f) => f.rcm_error * 1e6), null);
  chart(cmds, gap * 4 + cw * 3, cy, cw, ch, "lambda", hist.map((f) => f.lambda),
        scene.hello.lam0);
  return cmds;
}
