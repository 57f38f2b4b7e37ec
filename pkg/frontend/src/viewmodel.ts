// View-model between the socket and the renderer: holds the latest frame
// snapshot and the connection status, and maps pointer drags to force
// wrenches. Pure state + functions; nothing here touches the DOM or mutates
// simulation truth.

import { Hello, PROTOCOL_VERSION, ServerMessage, StateFrame } from "./protocol.js";

export type ConnectionState = "connecting" | "connected" | "read-only" | "disconnected";

export interface DragState {
  dxPx: number;
  dyPx: number;
}

export class CockpitModel {
  connection: ConnectionState = "connecting";
  banner = "";
  hello: Hello | null = null;
  frame: StateFrame | null = null;
  lastNackReason = "";
  drag: DragState | null = null;

  // drag mapping: pixels to newtons; the server clamp is authoritative, this
  // mirror just keeps the arrow honest on screen
  newtonsPerPixel = 0.2;
  forceLimit = 60.0;

  ingest(msg: ServerMessage): void {
    switch (msg.type) {
      case "hello":
        this.hello = msg;
        if (msg.version !== PROTOCOL_VERSION) {
          this.connection = "read-only";
          this.banner = `schema version ${msg.version} differs from ${PROTOCOL_VERSION}; showing read-only`;
        } else if (msg.role !== "control") {
          this.connection = "read-only";
          this.banner = "another client holds the control slot; observing";
        } else {
          this.connection = "connected";
          this.banner = "";
        }
        break;
      case "state":
        if (msg.version !== PROTOCOL_VERSION && this.connection !== "read-only") {
          this.connection = "read-only";
          this.banner = `schema version ${msg.version} differs from ${PROTOCOL_VERSION}; showing read-only`;
        }
        this.frame = msg;
        break;
      case "ack":
        break;
      case "nack":
        this.lastNackReason = `${msg.command}: ${msg.reason}`;
        break;
    }
  }

  disconnected(): void {
    this.connection = "disconnected";
    this.banner = "connection lost; inputs ignored";
    this.drag = null;
  }

  get controlling(): boolean {
    return this.connection === "connected";
  }

  /** Wrench for the current drag, clamped like the server clamps it. */
  dragWrench(): number[] {
    if (!this.drag) return [0, 0, 0, 0, 0, 0];
    return dragToWrench(this.drag.dxPx, this.drag.dyPx, this.newtonsPerPixel, this.forceLimit);
  }
}

/**
 * Screen-space drag to a world wrench: x right, y up (canvas y points down),
 * force along the drag, |F| = pixels * newtonsPerPixel capped at fMax.
 */
export function dragToWrench(
  dxPx: number,
  dyPx: number,
  newtonsPerPixel: number,
  fMax: number,
): number[] {
  let fx = dxPx * newtonsPerPixel;
  let fy = -dyPx * newtonsPerPixel;
  const magnitude = Math.hypot(fx, fy);
  if (magnitude > fMax && magnitude > 0) {
    fx *= fMax / magnitude;
    fy *= fMax / magnitude;
  }
  // + 0 normalizes the -0 that a zero drag component would produce
  return [fx + 0, fy + 0, 0, 0, 0, 0];
}

export interface GaugeRow {
  label: string;
  value: string;
  fraction: number | null; // bar fill, when the gauge has a natural scale
}

/** Gauge panel contents for a frame; everything shown comes from the frame. */
export function gaugeRows(frame: StateFrame): GaugeRow[] {
  const rows: GaugeRow[] = [];
  const forceMag = Math.hypot(frame.force[0], frame.force[1], frame.force[2]);
  rows.push({ label: "|F_e| (N)", value: forceMag.toFixed(1), fraction: Math.min(forceMag / 60.0, 1) });
  rows.push({
    label: "tank (J)",
    value: `${frame.tank.energy.toFixed(2)} / floor ${frame.tank.floor}`,
    fraction: Math.min(frame.tank.energy / Math.max(frame.tank.energy, 20), 1),
  });
  rows.push({ label: "budget (J)", value: frame.tank.budget.toFixed(2), fraction: null });
  const h = frame.h;
  const capsule = Object.keys(h).filter((k) => k.startsWith("capsule"));
  if (capsule.length > 0) {
    const hSafe = Math.min(...capsule.map((k) => h[k]));
    rows.push({ label: "h_safe", value: hSafe.toFixed(3), fraction: null });
  }
  if ("cyl_inner" in h) rows.push({ label: "h_cyl1", value: h.cyl_inner.toFixed(3), fraction: null });
  if ("cyl_outer" in h) rows.push({ label: "h_cyl2", value: h.cyl_outer.toFixed(3), fraction: null });
  rows.push({ label: "M diag", value: frame.M.slice(0, 3).map((v) => v.toFixed(1)).join(" "), fraction: null });
  rows.push({ label: "D diag", value: frame.D.slice(0, 3).map((v) => v.toFixed(1)).join(" "), fraction: null });
  rows.push({ label: "intent", value: frame.intent, fraction: null });
  rows.push({ label: "qp", value: `${frame.qp_status} (${frame.qp_iters})`, fraction: null });
  return rows;
}
