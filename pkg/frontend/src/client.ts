// WebSocket client for the teleoperation service. Thin by design: it
// parses frames, keeps the latest state plus a bounded history for the
// charts, and surfaces connection changes; all input logic lives in the
// stylus and all drawing in the renderer.

import type { HelloFrame, ServerFrame, StateFrame } from "./protocol.js";
import { parseServer } from "./protocol.js";

export interface ClientEvents {
  onHello?: (h: HelloFrame) => void;
  onState?: (s: StateFrame) => void;
  onError?: (message: string) => void;
  onClose?: () => void;
  onRawLine?: (line: string) => void; // recording hook
}

export const HISTORY_LIMIT = 600;

export class ServiceClient {
  hello: HelloFrame | null = null;
  state: StateFrame | null = null;
  history: StateFrame[] = [];
  dropped = 0;
  connected = false;

  private ws: WebSocket | null = null;
  private events: ClientEvents;

  constructor(events: ClientEvents = {}) {
    this.events = events;
  }

  connect(url: string): void {
    this.close();
    const ws = new WebSocket(url);
    this.ws = ws;
    ws.onopen = () => {
      this.connected = true;
    };
    ws.onmessage = (ev) => {
      if (typeof ev.data !== "string") return;
      this.events.onRawLine?.(ev.data);
      let frame: ServerFrame;
      try {
        frame = parseServer(ev.data);
      } catch {
        this.dropped += 1;
        return;
      }
      if (frame.type === "hello") {
        this.hello = frame;
        this.events.onHello?.(frame);
      } else if (frame.type === "state") {
        this.state = frame;
        this.history.push(frame);
        if (this.history.length > HISTORY_LIMIT) this.history.shift();
        this.events.onState?.(frame);
      } else if (frame.type === "error") {
        this.events.onError?.(frame.message);
      }
    };
    ws.onclose = () => {
      this.connected = false;
      this.ws = null;
      this.events.onClose?.();
    };
    ws.onerror = () => {
      // onclose follows; nothing to do here
    };
  }

  send(msg: object): void {
    if (this.ws !== null && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(msg));
    }
  }

  close(): void {
    if (this.ws !== null) {
      this.ws.close();
      this.ws = null;
    }
    this.connected = false;
  }
}
