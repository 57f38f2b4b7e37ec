import { describe, expect, it } from "vitest";

import { parseServerMessage, StateFrame } from "../src/protocol.js";
import { drawScene } from "../src/scene.js";
import { CockpitModel, dragToWrench, gaugeRows } from "../src/viewmodel.js";

function sampleFrame(overrides: Partial<StateFrame> = {}): StateFrame {
  return {
    type: "state",
    version: 1,
    tick: 42,
    t: 0.21,
    paused: false,
    scenario: "transport_stop_go",
    base_pose: [0.1, 0.0, 0.05],
    joint_angles: [0, 1.3, -2.6, 1.3, 0, 0],
    ee_position: [0.9, 0.0, 0.53],
    arm_points: [[0.2, 0, 0.35], [0.5, 0, 0.6], [0.9, 0, 0.53]],
    plank: { p1: [0.9, 0, 0.53], p2: [3.4, 0, 0.53], radius: 0.15 },
    obstacles: [[3.95, 0, 0.53]],
    grip: [3.4, 0, 0.53],
    d_min: 0.3,
    force: [12.0, 0.0, 0.0, 0, 0, 0],
    tank: { energy: 6.2, budget: 6.1, floor: 0.1 },
    h: { capsule_0: 0.41, cyl_inner: 0.54, cyl_outer: 0.37 },
    M: [4, 4, 4, 12, 12, 12],
    D: [20, 20, 20, 500, 500, 500],
    intent: "accelerate",
    qp_status: "optimal",
    qp_iters: 2,
    slacks: { capsule_0: 0.0 },
    ...overrides,
  };
}

describe("dragToWrench", () => {
  it("maps 100 px at 0.2 N/px to 20 N", () => {
    const w = dragToWrench(100, 0, 0.2, 60);
    expect(w[0]).toBeCloseTo(20.0, 10);
    expect(w.slice(1)).toEqual([0, 0, 0, 0, 0]);
  });

  it("flips canvas y into world y", () => {
    const w = dragToWrench(0, -50, 0.2, 60);
    expect(w[1]).toBeCloseTo(10.0, 10);
  });

  it("mirrors the server clamp", () => {
    const w = dragToWrench(1000, 0, 0.2, 60);
    expect(Math.hypot(w[0], w[1])).toBeCloseTo(60.0, 10);
  });

  it("zero drag is a zero wrench", () => {
    expect(dragToWrench(0, 0, 0.2, 60)).toEqual([0, 0, 0, 0, 0, 0]);
  });
});

describe("CockpitModel", () => {
  it("takes control on a matching hello", () => {
    const model = new CockpitModel();
    model.ingest({ type: "hello", version: 1, role: "control", scenario: "x",
                   dt: 0.005, frame_rate: 60, n_joints: 6 });
    expect(model.connection).toBe("connected");
    expect(model.controlling).toBe(true);
  });

  it("drops to read-only on a schema version mismatch", () => {
    const model = new CockpitModel();
    model.ingest({ type: "hello", version: 2, role: "control", scenario: "x",
                   dt: 0.005, frame_rate: 60, n_joints: 6 });
    expect(model.connection).toBe("read-only");
    expect(model.banner).toMatch(/version/);
    expect(model.controlling).toBe(false);
  });

  it("observers are read-only with a banner", () => {
    const model = new CockpitModel();
    model.ingest({ type: "hello", version: 1, role: "observer", scenario: "x",
                   dt: 0.005, frame_rate: 60, n_joints: 6 });
    expect(model.connection).toBe("read-only");
  });

  it("keeps the latest frame and surfaces nack reasons", () => {
    const model = new CockpitModel();
    model.ingest(sampleFrame());
    model.ingest(sampleFrame({ tick: 43 }));
    expect(model.frame?.tick).toBe(43);
    model.ingest({ type: "nack", command: "set_param", reason: "not settable" });
    expect(model.lastNackReason).toContain("not settable");
  });

  it("drag wrench follows the active drag and drops on disconnect", () => {
    const model = new CockpitModel();
    model.drag = { dxPx: 100, dyPx: 0 };
    expect(model.dragWrench()[0]).toBeCloseTo(20.0, 10);
    model.disconnected();
    expect(model.drag).toBeNull();
    expect(model.dragWrench()).toEqual([0, 0, 0, 0, 0, 0]);
  });
});

describe("parseServerMessage", () => {
  it("accepts the known types and rejects junk", () => {
    expect(parseServerMessage(JSON.stringify(sampleFrame()))?.type).toBe("state");
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage('{"type": "mystery"}')).toBeNull();
    expect(parseServerMessage("42")).toBeNull();
  });
});

describe("gaugeRows", () => {
  it("shows every monitored quantity from the frame", () => {
    const rows = gaugeRows(sampleFrame());
    const labels = rows.map((r) => r.label);
    for (const expected of ["|F_e| (N)", "tank (J)", "h_safe", "h_cyl1", "h_cyl2",
                            "M diag", "D diag", "intent", "qp"]) {
      expect(labels).toContain(expected);
    }
    expect(rows.find((r) => r.label === "|F_e| (N)")?.value).toBe("12.0");
    expect(rows.find((r) => r.label === "intent")?.value).toBe("accelerate");
  });
});

describe("drawScene purity", () => {
  it("never mutates the frame it renders", () => {
    // a context stub that swallows every call and property write
    const ctx = new Proxy({}, {
      get: (_t, prop) => (prop === "canvas" ? {} : () => undefined),
      set: () => true,
    }) as CanvasRenderingContext2D;
    const frame = sampleFrame();
    const snapshot = JSON.parse(JSON.stringify(frame));
    drawScene(ctx, Object.freeze(frame) as StateFrame, 800, 600, { dxPx: 10, dyPx: 4 });
    expect(frame).toEqual(snapshot);
  });
});
