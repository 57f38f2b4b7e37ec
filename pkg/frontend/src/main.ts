// Cockpit bootstrap: canvas + gauge panel + session controls. The operator
// drags from the plank's free end to pull on the load; everything displayed
// comes from the incoming state frames.

import { CockpitClient } from "./client.js";
import { drawScene, followCamera, worldToScreen } from "./scene.js";
import { CockpitModel, gaugeRows } from "./viewmodel.js";

const params = new URLSearchParams(window.location.search);
const url = params.get("server") ?? `ws://${window.location.hostname || "127.0.0.1"}:8765`;

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const gaugesEl = document.getElementById("gauges")!;
const bannerEl = document.getElementById("banner")!;
const statusEl = document.getElementById("status")!;
const nackEl = document.getElementById("nack")!;

const model = new CockpitModel();
const client = new CockpitClient(model, url);
client.connect();

let dragOrigin: [number, number] | null = null;

canvas.addEventListener("pointerdown", (ev) => {
  const frame = model.frame;
  if (!frame || !model.controlling) return;
  const cam = followCamera(frame, canvas.width, canvas.height);
  const [gx, gy] = worldToScreen(cam, canvas.width, canvas.height,
                                 frame.grip[0], frame.grip[1]);
  if (Math.hypot(ev.offsetX - gx, ev.offsetY - gy) < 40) {
    dragOrigin = [ev.offsetX, ev.offsetY];
    canvas.setPointerCapture(ev.pointerId);
    client.startDrag(0, 0);
  }
});

canvas.addEventListener("pointermove", (ev) => {
  if (dragOrigin) {
    client.moveDrag(ev.offsetX - dragOrigin[0], ev.offsetY - dragOrigin[1]);
  }
});

for (const kind of ["pointerup", "pointercancel"] as const) {
  canvas.addEventListener(kind, () => {
    if (dragOrigin) {
      dragOrigin = null;
      client.endDrag();
    }
  });
}

(document.getElementById("pause") as HTMLButtonElement).onclick = () => client.pause();
(document.getElementById("resume") as HTMLButtonElement).onclick = () => client.resume();
(document.getElementById("reset") as HTMLButtonElement).onclick = () => {
  const pick = (document.getElementById("scenario") as HTMLSelectElement).value;
  client.reset(pick || undefined);
};
(document.getElementById("adaptation") as HTMLInputElement).onchange = (ev) => {
  client.setParam("admittance.adaptation", (ev.target as HTMLInputElement).checked);
};
(document.getElementById("capsule") as HTMLInputElement).onchange = (ev) => {
  client.setParam("barriers.capsule.enabled", (ev.target as HTMLInputElement).checked);
};

function render(): void {
  const frame = model.frame;
  statusEl.textContent = `${model.connection}${frame ? `  t=${frame.t.toFixed(2)}s tick ${frame.tick}` : ""}`;
  statusEl.className = model.connection;
  bannerEl.textContent = model.banner;
  bannerEl.style.display = model.banner ? "block" : "none";
  nackEl.textContent = model.lastNackReason;

  if (frame) {
    drawScene(ctx, frame, canvas.width, canvas.height, model.drag);
    gaugesEl.innerHTML = "";
    for (const row of gaugeRows(frame)) {
      const div = document.createElement("div");
      div.className = "gauge";
      const label = document.createElement("span");
      label.className = "label";
      label.textContent = row.label;
      const value = document.createElement("span");
      value.className = "value";
      value.textContent = row.value;
      div.append(label, value);
      if (row.fraction !== null) {
        const bar = document.createElement("div");
        bar.className = "bar";
        const fill = document.createElement("div");
        fill.className = "fill";
        fill.style.width = `${(100 * row.fraction).toFixed(1)}%`;
        bar.append(fill);
        div.append(bar);
      }
      gaugesEl.append(div);
    }
  }
  requestAnimationFrame(render);
}

requestAnimationFrame(render);
