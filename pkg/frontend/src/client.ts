// WebSocket wiring: feeds server messages into the model and streams the
// current drag as force messages at a fixed input rate while a drag is live.
// Release (or loss of control) sends a single zero wrench.

import { commandMessage, forceMessage, parseServerMessage } from "./protocol.js";
import { CockpitModel } from "./viewmodel.js";

const INPUT_RATE_HZ = 30;
const HOLD_MS = 150;

export class CockpitClient {
  private ws: WebSocket | null = null;
  private sender: number | null = null;

  constructor(readonly model: CockpitModel, readonly url: string,
              private onUpdate: () => void = () => {}) {}

  connect(): void {
    this.model.connection = "connecting";
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onmessage = (event: MessageEvent) => {
      const msg = parseServerMessage(String(event.data));
      if (msg) {
        this.model.ingest(msg);
        this.onUpdate();
      }
    };
    ws.onclose = () => {
      this.model.disconnected();
      this.stopSender();
      this.onUpdate();
    };
    ws.onerror = () => {
      this.model.disconnected();
      this.onUpdate();
    };
  }

  startDrag(dxPx: number, dyPx: number): void {
    if (!this.model.controlling) return; // disconnected or read-only: ignore
    this.model.drag = { dxPx, dyPx };
    if (this.sender === null) {
      this.sendForce();
      this.sender = setInterval(() => this.sendForce(), 1000 / INPUT_RATE_HZ) as unknown as number;
    }
  }

  moveDrag(dxPx: number, dyPx: number): void {
    if (this.model.drag) {
      this.model.drag = { dxPx, dyPx };
    }
  }

  endDrag(): void {
    this.model.drag = null;
    this.stopSender();
    this.send(forceMessage([0, 0, 0, 0, 0, 0], HOLD_MS));
  }

  pause(): void {
    this.send(commandMessage("pause"));
  }

  resume(): void {
    this.send(commandMessage("resume"));
  }

  reset(scenario?: string): void {
    this.send(commandMessage("reset", scenario ? { scenario } : {}));
  }

  setParam(path: string, value: unknown): void {
    this.send(commandMessage("set_param", { path, value }));
  }

  private sendForce(): void {
    if (!this.model.drag) return;
    this.send(forceMessage(this.model.dragWrench(), HOLD_MS));
  }

  private send(payload: string): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(payload);
    }
  }

  private stopSender(): void {
    if (this.sender !== null) {
      clearInterval(this.sender);
      this.sender = null;
    }
  }
}
