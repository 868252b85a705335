// Quaternion helpers ([x, y, z, w], Hamilton convention, matching the
// wire format) plus the arcball mapping for the virtual stylus.

import type { Quat, Vec3 } from "./protocol.js";

export const QUAT_IDENTITY: Quat = [0, 0, 0, 1];

export function qMul(a: Quat, b: Quat): Quat {
  const [ax, ay, az, aw] = a;
  const [bx, by, bz, bw] = b;
  return [
    aw * bx + ax * bw + ay * bz - az * by,
    aw * by - ax * bz + ay * bw + az * bx,
    aw * bz + ax * by - ay * bx + az * bw,
    aw * bw - ax * bx - ay * by - az * bz,
  ];
}

export function qConj(q: Quat): Quat {
  return [-q[0], -q[1], -q[2], q[3]];
}

export function qNormalize(q: Quat): Quat {
  const n = Math.hypot(...q);
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

export function qFromAxisAngle(axis: Vec3, angle: number): Quat {
  const n = Math.hypot(...axis);
  if (n < 1e-12) return [...QUAT_IDENTITY];
  const s = Math.sin(angle / 2) / n;
  return [axis[0] * s, axis[1] * s, axis[2] * s, Math.cos(angle / 2)];
}

export function qAngle(q: Quat): number {
  const w = Math.min(1, Math.max(-1, qNormalize(q)[3]));
  return 2 * Math.acos(Math.abs(w));
}

// v + 2 w (u x v) + 2 u x (u x v), u the vector part
export function qRotate(q: Quat, v: Vec3): Vec3 {
  const [x, y, z, w] = q;
  const ux = y * v[2] - z * v[1];
  const uy = z * v[0] - x * v[2];
  const uz = x * v[1] - y * v[0];
  return [
    v[0] + 2 * (w * ux + y * uz - z * uy),
    v[1] + 2 * (w * uy + z * ux - x * uz),
    v[2] + 2 * (w * uz + x * uy - y * ux),
  ];
}

// Map a screen point (pixels from the view center, screen y down) onto
// the unit sphere of pixel radius r: inside the disc the point lifts to
// the front hemisphere, outside it clamps to the equator.
export function arcballPoint(xPx: number, yPx: number, rPx: number): Vec3 {
  let x = xPx / rPx;
  let y = -yPx / rPx;
  const r2 = x * x + y * y;
  if (r2 > 1) {
    const s = 1 / Math.sqrt(r2);
    return [x * s, y * s, 0];
  }
  return [x, y, Math.sqrt(1 - r2)];
}

// Rotation carrying sphere point a to sphere point b: axis a x b, angle
// the great-circle separation. A drag spanning 90 degrees of the sphere
// therefore yields a quarter-turn quaternion.
export function arcballRotation(a: Vec3, b: Vec3): Quat {
  const axis: Vec3 = [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
  const dot = Math.min(1, Math.max(-1, a[0] * b[0] + a[1] * b[1] + a[2] * b[2]));
  return qFromAxisAngle(axis, Math.acos(dot));
}
