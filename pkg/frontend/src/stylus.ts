// Virtual stylus: a mouse standing in for a calibrated leader device.
// Drag translates in the stylus x/y plane, the wheel feeds depth, a
// modifier drag rotates through an arcball. Emission is gated by the
// clutch (nothing leaves this class while disengaged, except the single
// anchor pose the engage handshake needs, because the server refuses a
// clutch without a stylus pose) and rate-limited latest-wins.

import type { Quat, Vec3 } from "./protocol.js";
import { clutchCommand, stylusPoseCommand } from "./protocol.js";
import { arcballPoint, arcballRotation, qMul, qNormalize, QUAT_IDENTITY } from "./quat.js";

export interface StylusConfig {
  pxToM: number; // meters of stylus travel per pixel of drag
  maxHz: number; // emission ceiling; latest pose wins between slots
  arcballPx: number; // pixel radius of the rotation sphere
}

export const STYLUS_DEFAULTS: StylusConfig = {
  pxToM: 0.0002,
  maxHz: 125,
  arcballPx: 200,
};

export type EmitFn = (msg: object) => void;

export class VirtualStylus {
  cfg: StylusConfig;
  position: Vec3 = [0, 0, 0];
  orientation: Quat = [...QUAT_IDENTITY];
  clutched = false;
  enabled = false; // tracks the connection; no connection, no input

  private emit: EmitFn;
  private pendingPose = false;
  private lastEmitMs = -Infinity;

  constructor(emit: EmitFn, cfg: Partial<StylusConfig> = {}) {
    this.cfg = { ...STYLUS_DEFAULTS, ...cfg };
    this.emit = emit;
  }

  setEnabled(on: boolean): void {
    this.enabled = on;
    if (!on) {
      // the server already declutched on disconnect; just mirror it
      this.clutched = false;
      this.pendingPose = false;
    }
  }

  translate(dxPx: number, dyPx: number): void {
    if (!this.enabled) return;
    this.position[0] += dxPx * this.cfg.pxToM;
    this.position[1] -= dyPx * this.cfg.pxToM; // screen y grows downward
    this.pendingPose = true;
  }

  depth(wheelPx: number): void {
    if (!this.enabled) return;
    this.position[2] -= wheelPx * this.cfg.pxToM; // wheel up moves in
    this.pendingPose = true;
  }

  // Arcball rotation between two pointer positions, both relative to the
  // view center.
  rotate(x0Px: number, y0Px: number, x1Px: number, y1Px: number): void {
    if (!this.enabled) return;
    const a = arcballPoint(x0Px, y0Px, this.cfg.arcballPx);
    const b = arcballPoint(x1Px, y1Px, this.cfg.arcballPx);
    this.orientation = qNormalize(qMul(arcballRotation(a, b), this.orientation));
    this.pendingPose = true;
  }

  engage(nowMs: number): void {
    if (!this.enabled || this.clutched) return;
    // anchor first: the mapping is relative to the pose at engage time
    this.emit(stylusPoseCommand([...this.position], [...this.orientation]));
    this.emit(clutchCommand(true));
    this.clutched = true;
    this.pendingPose = false;
    this.lastEmitMs = nowMs;
  }

  release(): void {
    if (!this.clutched) return;
    this.emit(clutchCommand(false));
    this.clutched = false;
    this.pendingPose = false;
  }

  // Called from the animation loop; sends at most one pose per rate slot.
  flush(nowMs: number): void {
    if (!this.clutched || !this.pendingPose) return;
    if (nowMs - this.lastEmitMs < 1000 / this.cfg.maxHz) return;
    this.emit(stylusPoseCommand([...this.position], [...this.orientation]));
    this.pendingPose = false;
    this.lastEmitMs = nowMs;
  }
}
