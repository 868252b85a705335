// Display-only kinematics. The server is authoritative for every pose it
// broadcasts; this file exists because frames arrive as joint values and
// the skeleton still has to be drawn. It duplicates the classic DH link
// matrix and the constant-curvature arc on purpose, and nothing here
// feeds back into control.

import type { ModelInfo, Vec3 } from "./protocol.js";

export interface Frame {
  R: number[][]; // 3x3, row major
  p: Vec3;
}

export const FRAME_IDENTITY: Frame = {
  R: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
  p: [0, 0, 0],
};

export function matVec(R: number[][], v: Vec3): Vec3 {
  return [
    R[0][0] * v[0] + R[0][1] * v[1] + R[0][2] * v[2],
    R[1][0] * v[0] + R[1][1] * v[1] + R[1][2] * v[2],
    R[2][0] * v[0] + R[2][1] * v[1] + R[2][2] * v[2],
  ];
}

function matMul(A: number[][], B: number[][]): number[][] {
  const C = [[0, 0, 0], [0, 0, 0], [0, 0, 0]];
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      C[i][j] = A[i][0] * B[0][j] + A[i][1] * B[1][j] + A[i][2] * B[2][j];
    }
  }
  return C;
}

export function compose(a: Frame, b: Frame): Frame {
  const p = matVec(a.R, b.p);
  return {
    R: matMul(a.R, b.R),
    p: [a.p[0] + p[0], a.p[1] + p[1], a.p[2] + p[2]],
  };
}

// Classic DH link matrix; q adds to the row's theta offset.
export function linkTransform(row: number[], q: number): Frame {
  const [thetaOffset, d, alpha, a] = row;
  const th = q + thetaOffset;
  const ct = Math.cos(th), st = Math.sin(th);
  const ca = Math.cos(alpha), sa = Math.sin(alpha);
  return {
    R: [
      [ct, -ca * st, sa * st],
      [st, ca * ct, -sa * ct],
      [0, sa, ca],
    ],
    p: [a * ct, a * st, d],
  };
}

// Base-frame poses of frames {0}..{n}; element 0 is the identity.
export function chainFrames(qArm: number[], dh: number[][]): Frame[] {
  const frames: Frame[] = [FRAME_IDENTITY];
  for (let k = 0; k < dh.length; k++) {
    frames.push(compose(frames[frames.length - 1], linkTransform(dh[k], qArm[k])));
  }
  return frames;
}

export function insFrame(qArm: number[], model: ModelInfo): Frame {
  const flange = chainFrames(qArm, model.dh)[model.dh.length];
  return compose(flange, {
    R: FRAME_IDENTITY.R,
    p: [model.tool_xyz[0], model.tool_xyz[1], model.tool_xyz[2]],
  });
}

const THETA0 = Math.PI / 2;

// Points along the bent segment in the feed frame {ins}. theta is the
// tangent angle (pi/2 straight), delta rotates the bending plane about
// the feed axis; the arc has curvature (theta0 - theta) / L.
export function segmentArc(theta: number, delta: number, L: number, n: number): Vec3[] {
  const phi = THETA0 - theta;
  const cd = Math.cos(delta), sd = Math.sin(delta);
  const pts: Vec3[] = [];
  for (let i = 0; i <= n; i++) {
    const s = i / n;
    let x: number, z: number;
    if (Math.abs(phi) < 1e-9) {
      x = 0;
      z = s * L;
    } else {
      const rho = L / phi;
      x = rho * (1 - Math.cos(s * phi));
      z = rho * Math.sin(s * phi);
    }
    // bending plane rotated about the feed axis by -delta
    pts.push([cd * x, -sd * x, z]);
  }
  return pts;
}

// Segment points in the base frame for one broadcast state.
export function segmentArcWorld(qAug: number[], model: ModelInfo, n: number): Vec3[] {
  const ins = insFrame(qAug.slice(0, 7), model);
  return segmentArc(qAug[7], qAug[8], model.L, n).map((p) => {
    const w = matVec(ins.R, p);
    return [ins.p[0] + w[0], ins.p[1] + w[1], ins.p[2] + w[2]] as Vec3;
  });
}

// Joint origins for the skeleton polyline: base, each DH frame, then the
// feed frame at the end of the rigid shaft.
export function skeletonPoints(qAug: number[], model: ModelInfo): Vec3[] {
  const qArm = qAug.slice(0, 7);
  const frames = chainFrames(qArm, model.dh);
  const pts = frames.map((f) => f.p);
  pts.push(insFrame(qArm, model).p);
  return pts;
}
