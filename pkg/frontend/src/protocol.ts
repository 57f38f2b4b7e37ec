// Wire protocol spoken by the session service: JSON messages with a "type"
// tag; state frames carry a schema version the cockpit checks before it
// trusts the payload shape.

export const PROTOCOL_VERSION = 1;

export interface Hello {
  type: "hello";
  version: number;
  role: "control" | "observer";
  scenario: string;
  dt: number;
  frame_rate: number;
  n_joints: number;
}

export interface TankGauge {
  energy: number;
  budget: number;
  floor: number;
}

export interface PlankShape {
  p1: number[];
  p2: number[];
  radius: number;
}

export interface StateFrame {
  type: "state";
  version: number;
  tick: number;
  t: number;
  paused: boolean;
  scenario: string;
  base_pose: number[];
  joint_angles: number[];
  ee_position: number[];
  arm_points: number[][];
  plank: PlankShape | null;
  obstacles: number[][];
  grip: number[];
  d_min: number;
  force: number[];
  tank: TankGauge;
  h: Record<string, number>;
  M: number[];
  D: number[];
  intent: string;
  qp_status: string;
  qp_iters: number;
  slacks: Record<string, number>;
}

export interface Ack {
  type: "ack";
  command: string;
  path?: string;
}

export interface Nack {
  type: "nack";
  command: string;
  reason: string;
}

export type ServerMessage = Hello | StateFrame | Ack | Nack;

export interface ForceMessage {
  type: "force";
  wrench: number[];
  hold_ms: number;
}

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const type = (data as { type?: unknown }).type;
  if (type === "hello" || type === "state" || type === "ack" || type === "nack") {
    return data as ServerMessage;
  }
  return null;
}

export function forceMessage(wrench: number[], holdMs = 150): string {
  const msg: ForceMessage = { type: "force", wrench, hold_ms: holdMs };
  return JSON.stringify(msg);
}

export function commandMessage(
  command: "pause" | "resume" | "reset" | "set_param",
  extra: Record<string, unknown> = {},
): string {
  return JSON.stringify({ type: command, ...extra });
}
