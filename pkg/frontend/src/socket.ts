/**
 * Thin WebSocket wrapper: JSON out, parsed protocol messages in,
 * auto-reconnect with backoff. Nothing is ever queued while
 * disconnected — stale poses must not arrive in a burst on reconnect.
 */

import type { ClientMessage, ServerMessage } from "./protocol.js";
import { parseServerMessage } from "./protocol.js";

export interface SessionSocketOptions {
  url: string;
  audioMode?: "pcm" | "gains";
  onMessage: (msg: ServerMessage) => void;
  onStateChange: (connected: boolean) => void;
}

const BACKOFF_BASE_MS = 500;
const BACKOFF_MAX_MS = 8000;

export class SessionSocket {
  private ws: WebSocket | null = null;
  private attempt = 0;
  private closed = false;

  constructor(private readonly options: SessionSocketOptions) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  send(msg: ClientMessage): boolean {
    if (this.ws?.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(msg));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.send({ type: "bye" });
    this.ws?.close();
    this.ws = null;
  }

  private open(): void {
    this.ws = new WebSocket(this.options.url);
    this.ws.onopen = () => {
      this.attempt = 0;
      this.options.onStateChange(true);
      const hello: ClientMessage = this.options.audioMode
        ? { type: "hello", audio_mode: this.options.audioMode }
        : { type: "hello" };
      this.send(hello);
    };
    this.ws.onmessage = (ev) => {
      if (typeof ev.data !== "string") return;
      const msg = parseServerMessage(ev.data);
      if (msg) this.options.onMessage(msg);
    };
    this.ws.onclose = () => {
      this.ws = null;
      this.options.onStateChange(false);
      if (!this.closed) {
        const delay = Math.min(
          BACKOFF_BASE_MS * 2 ** this.attempt,
          BACKOFF_MAX_MS,
        );
        this.attempt++;
        setTimeout(() => {
          if (!this.closed) this.open();
        }, delay);
      }
    };
  }
}
