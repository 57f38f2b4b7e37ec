// Top-down 2D rendering of a state frame. The camera follows the midpoint
// between the base and the grip; everything drawn comes straight from the
// frame (the renderer never writes back into it).

import { StateFrame } from "./protocol.js";
import { DragState } from "./viewmodel.js";

export interface Camera {
  cx: number; // world coords at the canvas center
  cy: number;
  scale: number; // pixels per meter
}

export function followCamera(frame: StateFrame, width: number, height: number): Camera {
  const gx = frame.grip[0];
  const gy = frame.grip[1];
  const bx = frame.base_pose[0];
  const by = frame.base_pose[1];
  return {
    cx: (gx + bx) / 2,
    cy: (gy + by) / 2,
    scale: Math.min(width, height) / 7.0,
  };
}

export function worldToScreen(cam: Camera, width: number, height: number,
                              x: number, y: number): [number, number] {
  return [width / 2 + (x - cam.cx) * cam.scale, height / 2 - (y - cam.cy) * cam.scale];
}

export function screenToWorld(cam: Camera, width: number, height: number,
                              px: number, py: number): [number, number] {
  return [cam.cx + (px - width / 2) / cam.scale, cam.cy - (py - height / 2) / cam.scale];
}

export function drawScene(ctx: CanvasRenderingContext2D, frame: StateFrame,
                          width: number, height: number, drag: DragState | null): void {
  const cam = followCamera(frame, width, height);
  const pt = (x: number, y: number) => worldToScreen(cam, width, height, x, y);

  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);

  drawGrid(ctx, cam, width, height);

  // base footprint (rectangle around the axle midpoint, oriented by heading)
  const [bx, by, th] = frame.base_pose;
  const L = 0.45, W = 0.35;
  ctx.strokeStyle = "#7fb2ff";
  ctx.fillStyle = "rgba(78, 124, 255, 0.25)";
  ctx.lineWidth = 2;
  ctx.beginPath();
  const corners: Array<[number, number]> = [
    [L, W], [L, -W], [-L, -W], [-L, W],
  ];
  corners.forEach(([dx, dy], i) => {
    const wx = bx + dx * Math.cos(th) - dy * Math.sin(th);
    const wy = by + dx * Math.sin(th) + dy * Math.cos(th);
    const [px, py] = pt(wx, wy);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.closePath();
  ctx.fill();
  ctx.stroke();
  // heading tick
  const [hx, hy] = pt(bx + 0.55 * Math.cos(th), by + 0.55 * Math.sin(th));
  const [cx0, cy0] = pt(bx, by);
  line(ctx, cx0, cy0, hx, hy, "#7fb2ff", 2);

  // arm linkage projection
  ctx.strokeStyle = "#ffd166";
  ctx.lineWidth = 3;
  ctx.beginPath();
  frame.arm_points.forEach((p, i) => {
    const [px, py] = pt(p[0], p[1]);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
  for (const p of frame.arm_points) {
    const [px, py] = pt(p[0], p[1]);
    dot(ctx, px, py, 3, "#ffd166");
  }

  // plank capsule outline
  if (frame.plank) {
    const [x1, y1] = pt(frame.plank.p1[0], frame.plank.p1[1]);
    const [x2, y2] = pt(frame.plank.p2[0], frame.plank.p2[1]);
    ctx.strokeStyle = "#9be28c";
    ctx.lineCap = "round";
    ctx.lineWidth = 2 * frame.plank.radius * cam.scale;
    line(ctx, x1, y1, x2, y2, "rgba(155, 226, 140, 0.35)", 2 * frame.plank.radius * cam.scale);
    ctx.lineWidth = 3;
    line(ctx, x1, y1, x2, y2, "#9be28c", 3);
    ctx.lineCap = "butt";
  }

  // obstacles with the clearance ring
  for (const obs of frame.obstacles) {
    const [px, py] = pt(obs[0], obs[1]);
    dot(ctx, px, py, 6, "#ff6b6b");
    ctx.strokeStyle = "rgba(255, 107, 107, 0.6)";
    ctx.setLineDash([6, 6]);
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.arc(px, py, frame.d_min * cam.scale, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  // grip point and the applied / dragged force arrow
  const [gx, gy] = pt(frame.grip[0], frame.grip[1]);
  dot(ctx, gx, gy, 6, "#ffffff");
  const fx = frame.force[0];
  const fy = frame.force[1];
  if (Math.hypot(fx, fy) > 0.25) {
    arrow(ctx, gx, gy, gx + fx * 3, gy - fy * 3, "#4ecdc4");
  }
  if (drag) {
    arrow(ctx, gx, gy, gx + drag.dxPx, gy + drag.dyPx, "rgba(255,255,255,0.7)");
  }
}

function drawGrid(ctx: CanvasRenderingContext2D, cam: Camera, width: number, height: number): void {
  ctx.strokeStyle = "rgba(255,255,255,0.07)";
  ctx.lineWidth = 1;
  const x0 = Math.floor(cam.cx - width / cam.scale / 2);
  const x1 = Math.ceil(cam.cx + width / cam.scale / 2);
  const y0 = Math.floor(cam.cy - height / cam.scale / 2);
  const y1 = Math.ceil(cam.cy + height / cam.scale / 2);
  for (let x = x0; x <= x1; x++) {
    const [px] = worldToScreen(cam, width, height, x, 0);
    line(ctx, px, 0, px, height, "rgba(255,255,255,0.07)", 1);
  }
  for (let y = y0; y <= y1; y++) {
    const [, py] = worldToScreen(cam, width, height, 0, y);
    line(ctx, 0, py, width, py, "rgba(255,255,255,0.07)", 1);
  }
}

function line(ctx: CanvasRenderingContext2D, x1: number, y1: number,
              x2: number, y2: number, style: string, widthPx: number): void {
  ctx.strokeStyle = style;
  ctx.lineWidth = widthPx;
  ctx.beginPath();
  ctx.moveTo(x1, y1);
  ctx.lineTo(x2, y2);
  ctx.stroke();
}

function dot(ctx: CanvasRenderingContext2D, x: number, y: number, r: number, style: string): void {
  ctx.fillStyle = style;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fill();
}

function arrow(ctx: CanvasRenderingContext2D, x1: number, y1: number,
               x2: number, y2: number, style: string): void {
  line(ctx, x1, y1, x2, y2, style, 2);
  const angle = Math.atan2(y2 - y1, x2 - x1);
  ctx.beginPath();
  ctx.moveTo(x2, y2);
  ctx.lineTo(x2 - 9 * Math.cos(angle - 0.4), y2 - 9 * Math.sin(angle - 0.4));
  ctx.lineTo(x2 - 9 * Math.cos(angle + 0.4), y2 - 9 * Math.sin(angle + 0.4));
  ctx.closePath();
  ctx.fillStyle = style;
  ctx.fill();
}
