import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  chainFrames,
  compose,
  insFrame,
  segmentArc,
  segmentArcWorld,
  skeletonPoints,
} from "../src/kinematics.js";

const fixturePath = fileURLToPath(new URL("./fixtures/kinematics.json", import.meta.url));
const fx = JSON.parse(readFileSync(fixturePath, "utf8"));

const model = fx.model;

function maxAbsDiff(a: number[][], b: number[][]): number {
  let worst = 0;
  for (let i = 0; i < a.length; i++) {
    for (let j = 0; j < 3; j++) {
      worst = Math.max(worst, Math.abs(a[i][j] - b[i][j]));
    }
  }
  return worst;
}

describe("arm chain against recorded reference poses", () => {
  for (const [idx, c] of fx.cases.entries()) {
    it(`chain case ${idx}`, () => {
      const pts = skeletonPoints(c.q_aug, model);
      expect(pts.length).toBe(c.skeleton.length);
      expect(maxAbsDiff(pts, c.skeleton)).toBeLessThan(1e-9);

      const qArm = c.q_aug.slice(0, 7);
      const frames = chainFrames(qArm, model.dh);
      expect(frames.length).toBe(model.dh.length + 1);
      // frame 0 is the base
      expect(frames[0].p).toEqual([0, 0, 0]);
      // the feed frame origin closes the skeleton polyline
      const ins = insFrame(qArm, model);
      expect(maxAbsDiff([ins.p], [c.skeleton[c.skeleton.length - 1]])).toBeLessThan(1e-9);

      const arc = segmentArcWorld(c.q_aug, model, 8);
      expect(arc.length).toBe(9);
      const end = arc[arc.length - 1];
      for (let j = 0; j < 3; j++) {
        expect(Math.abs(end[j] - c.arc_end_world[j])).toBeLessThan(1e-9);
      }
    });
  }
});

describe("distal segment arc", () => {
  for (const [idx, s] of fx.segment_local.entries()) {
    it(`local arc case ${idx}`, () => {
      const pts = segmentArc(s.theta, s.delta, model.L, 16);
      expect(pts.length).toBe(17);
      expect(Math.hypot(pts[0][0], pts[0][1], pts[0][2])).toBe(0);
      const end = pts[pts.length - 1];
      for (let j = 0; j < 3; j++) {
        expect(Math.abs(end[j] - s.end[j])).toBeLessThan(1e-9);
      }
      // the chord never exceeds the arc length
      for (const p of pts) {
        expect(Math.hypot(p[0], p[1], p[2])).toBeLessThanOrEqual(model.L + 1e-12);
      }
    });
  }

  it("straight configuration degenerates to a line along z", () => {
    const pts = segmentArc(Math.PI / 2, 1.234, model.L, 10);
    for (const [i, p] of pts.entries()) {
      expect(Math.abs(p[0])).toBeLessThan(1e-12);
      expect(Math.abs(p[1])).toBeLessThan(1e-12);
      expect(Math.abs(p[2] - (model.L * i) / 10)).toBeLessThan(1e-12);
    }
  });

  it("polyline length converges to the segment length", () => {
    const n = 2000;
    const pts = segmentArc(1.1, 0.7, model.L, n);
    let len = 0;
    for (let i = 1; i <= n; i++) {
      len += Math.hypot(
        pts[i][0] - pts[i - 1][0],
        pts[i][1] - pts[i - 1][1],
        pts[i][2] - pts[i - 1][2],
      );
    }
    expect(Math.abs(len - model.L)).toBeLessThan(1e-6);
  });
});

describe("frame composition", () => {
  it("compose matches manual rotation plus translation", () => {
    const a = {
      R: [
        [0, -1, 0],
        [1, 0, 0],
        [0, 0, 1],
      ],
      p: [1, 2, 3] as [number, number, number],
    };
    const b = {
      R: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
      p: [0.5, 0, 0] as [number, number, number],
    };
    const c = compose(a, b);
    expect(c.p[0]).toBeCloseTo(1, 12);
    expect(c.p[1]).toBeCloseTo(2.5, 12);
    expect(c.p[2]).toBeCloseTo(3, 12);
  });
});
