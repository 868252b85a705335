// Wire schema for the teleoperation service: JSON objects, one per
// WebSocket text frame (or per line on the raw socket). Positions are
// meters in the robot base frame, orientations unit quaternions
// [x, y, z, w]. Parsing is strict: a frame that does not match the
// documented shape throws, and the caller drops it and counts it.

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number];

export interface WirePose {
  position: Vec3;
  orientation: Quat;
}

export interface ModelInfo {
  dh: number[][]; // rows [theta_offset, d, alpha, a]
  tool_xyz: number[];
  L: number;
  r: number;
  theta_min: number;
}

export interface HelloFrame {
  type: "hello";
  dt: number;
  case: number;
  lam0: number;
  realtime: boolean;
  motion_scale: number;
  trocar: Vec3;
  model: ModelInfo;
}

export interface StateFrame {
  type: "state";
  time: number;
  q_aug: number[]; // [q1..q7, theta, delta, lambda]
  tip_pose: WirePose;
  desired_pose: WirePose | null;
  e_p: Vec3;
  e_o: Vec3;
  rcm_error: number;
  case: number;
  lambda: number;
  motor_positions: number[];
  clutched: boolean;
}

export interface TickDoneFrame {
  type: "tick_done";
  time: number;
  ticks: number;
}

export interface ErrorFrame {
  type: "error";
  message: string;
}

export type ServerFrame = HelloFrame | StateFrame | TickDoneFrame | ErrorFrame;

function isFiniteNumber(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

function numberList(x: unknown, n: number, what: string): number[] {
  if (!Array.isArray(x) || x.length !== n || !x.every(isFiniteNumber)) {
    throw new Error(`${what} must be a list of ${n} finite numbers`);
  }
  return x as number[];
}

function rejectUnknown(d: Record<string, unknown>, allowed: string[], what: string): void {
  for (const k of Object.keys(d)) {
    if (!allowed.includes(k)) {
      throw new Error(`${what} has unknown field ${JSON.stringify(k)}`);
    }
  }
}

export function parsePose(x: unknown): WirePose {
  if (typeof x !== "object" || x === null) {
    throw new Error("pose must be an object");
  }
  const d = x as Record<string, unknown>;
  rejectUnknown(d, ["position", "orientation"], "pose");
  const position = numberList(d.position, 3, "pose.position") as Vec3;
  const orientation = numberList(d.orientation, 4, "pose.orientation") as Quat;
  const norm = Math.hypot(...orientation);
  if (!(norm > 0.5 && norm < 2.0)) {
    throw new Error("pose.orientation norm far from 1");
  }
  return { position, orientation };
}

function parseModel(x: unknown): ModelInfo {
  if (typeof x !== "object" || x === null) throw new Error("model must be an object");
  const d = x as Record<string, unknown>;
  rejectUnknown(d, ["dh", "tool_xyz", "L", "r", "theta_min"], "model");
  if (!Array.isArray(d.dh) || d.dh.length === 0) {
    throw new Error("model.dh must be a non-empty list of rows");
  }
  const dh = d.dh.map((row: unknown, i: number) => numberList(row, 4, `model.dh[${i}]`));
  return {
    dh,
    tool_xyz: numberList(d.tool_xyz, 3, "model.tool_xyz"),
    L: requireFinite(d.L, "model.L"),
    r: requireFinite(d.r, "model.r"),
    theta_min: requireFinite(d.theta_min, "model.theta_min"),
  };
}

function requireFinite(x: unknown, what: string): number {
  if (!isFiniteNumber(x)) throw new Error(`${what} must be a finite number`);
  return x;
}

function requireBool(x: unknown, what: string): boolean {
  if (typeof x !== "boolean") throw new Error(`${what} must be a boolean`);
  return x;
}

export function parseServer(raw: string): ServerFrame {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    throw new Error("not valid JSON");
  }
  if (typeof msg !== "object" || msg === null) {
    throw new Error("frame must be a JSON object");
  }
  const d = msg as Record<string, unknown>;
  switch (d.type) {
    case "hello":
      rejectUnknown(d, ["type", "dt", "case", "lam0", "realtime", "motion_scale",
                        "trocar", "model"], "hello");
      return {
        type: "hello",
        dt: requireFinite(d.dt, "hello.dt"),
        case: requireCase(d.case),
        lam0: requireFinite(d.lam0, "hello.lam0"),
        realtime: requireBool(d.realtime, "hello.realtime"),
        motion_scale: requireFinite(d.motion_scale, "hello.motion_scale"),
        trocar: numberList(d.trocar, 3, "hello.trocar") as Vec3,
        model: parseModel(d.model),
      };
    case "state":
      rejectUnknown(d, ["type", "time", "q_aug", "tip_pose", "desired_pose",
                        "e_p", "e_o", "rcm_error", "case", "lambda",
                        "motor_positions", "clutched"], "state");
      return {
        type: "state",
        time: requireFinite(d.time, "state.time"),
        q_aug: numberList(d.q_aug, 10, "state.q_aug"),
        tip_pose: parsePose(d.tip_pose),
        desired_pose: d.desired_pose === null ? null : parsePose(d.desired_pose),
        e_p: numberList(d.e_p, 3, "state.e_p") as Vec3,
        e_o: numberList(d.e_o, 3, "state.e_o") as Vec3,
        rcm_error: requireFinite(d.rcm_error, "state.rcm_error"),
        case: requireCase(d.case),
        lambda: requireFinite(d.lambda, "state.lambda"),
        motor_positions: numberList(d.motor_positions, 4, "state.motor_positions"),
        clutched: requireBool(d.clutched, "state.clutched"),
      };
    case "tick_done":
      rejectUnknown(d, ["type", "time", "ticks"], "tick_done");
      return {
        type: "tick_done",
        time: requireFinite(d.time, "tick_done.time"),
        ticks: requireFinite(d.ticks, "tick_done.ticks"),
      };
    case "error": {
      rejectUnknown(d, ["type", "message"], "error");
      if (typeof d.message !== "string") throw new Error("error.message must be a string");
      return { type: "error", message: d.message };
    }
    default:
      throw new Error(`unknown frame type ${JSON.stringify(d.type)}`);
  }
}

function requireCase(x: unknown): number {
  if (x !== 0 && x !== 1 && x !== 2) throw new Error("case must be 0, 1 or 2");
  return x;
}

// Serialization rebuilds the documented fields in the server's key order,
// so serialize(parse(frame)) is an identity on every field the protocol
// defines (byte equality is not promised: number formatting differs
// between runtimes).
export function serializeServer(f: ServerFrame): string {
  switch (f.type) {
    case "hello":
      return JSON.stringify({
        type: f.type, dt: f.dt, case: f.case, lam0: f.lam0,
        realtime: f.realtime, motion_scale: f.motion_scale,
        trocar: f.trocar,
        model: {
          dh: f.model.dh, tool_xyz: f.model.tool_xyz, L: f.model.L,
          r: f.model.r, theta_min: f.model.theta_min,
        },
      });
    case "state":
      return JSON.stringify({
        type: f.type, time: f.time, q_aug: f.q_aug, tip_pose: f.tip_pose,
        desired_pose: f.desired_pose, e_p: f.e_p, e_o: f.e_o,
        rcm_error: f.rcm_error, case: f.case, lambda: f.lambda,
        motor_positions: f.motor_positions, clutched: f.clutched,
      });
    case "tick_done":
      return JSON.stringify({ type: f.type, time: f.time, ticks: f.ticks });
    case "error":
      return JSON.stringify({ type: f.type, message: f.message });
  }
}

// ---- client commands ----

export function clutchCommand(on: boolean): object {
  return { type: "clutch", on };
}

export function stylusPoseCommand(p: Vec3, q: Quat): object {
  const norm = Math.hypot(...q);
  if (!(norm > 1e-9) || !q.every(isFiniteNumber) || !p.every(isFiniteNumber)) {
    throw new Error("stylus pose must be finite with a nonzero quaternion");
  }
  // normalized before send, so the server never sees an off-unit rotation
  const qn = q.map((x) => x / norm) as Quat;
  return { type: "stylus_pose", pose: { position: [...p], orientation: qn } };
}

export function setCaseCommand(c: number): object {
  if (c !== 0 && c !== 1 && c !== 2) throw new Error("case must be 0, 1 or 2");
  return { type: "set_case", case: c };
}

export function setScaleCommand(s: number): object {
  if (!isFiniteNumber(s) || !(s > 0 && s <= 10)) {
    throw new Error("scale must lie in (0, 10]");
  }
  return { type: "set_scale", scale: s };
}

export function resetCommand(): object {
  return { type: "reset" };
}

export function tickCommand(n: number): object {
  if (!Number.isInteger(n) || n < 1 || n > 1_000_000) {
    throw new Error("tick count must be an integer in [1, 1e6]");
  }
  return { type: "tick", n };
}
