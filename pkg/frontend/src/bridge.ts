/**
 * Bridge connection: one WebSocket, reconnection with exponential backoff,
 * and a staleness watchdog that flags 10 s of silence.  Socket construction
 * and timers are injectable so the logic is testable without a server.
 */

import type { BridgeEvent, Command } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
}

export interface BridgeOptions {
  url: string;
  onEvent: (event: BridgeEvent) => void;
  socketFactory?: (url: string) => SocketLike;
  staleAfterMs?: number;
  maxBackoffMs?: number;
}

export class BridgeClient {
  private socket: SocketLike | null = null;
  private attempts = 0;
  private staleTimer: ReturnType<typeof setTimeout> | null = null;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;

  constructor(private options: BridgeOptions) {}

  connect(): void {
    this.closed = false;
    const factory =
      this.options.socketFactory ?? ((url: string) => new WebSocket(url) as unknown as SocketLike);
    const socket = factory(this.options.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.options.onEvent({ type: "connected" });
      this.armStaleTimer();
    };
    socket.onmessage = (message) => {
      this.armStaleTimer();
      let event: BridgeEvent;
      try {
        event = JSON.parse(message.data) as BridgeEvent;
      } catch {
        return; // not ours
      }
      this.options.onEvent(event);
    };
    socket.onclose = () => {
      this.clearStaleTimer();
      this.options.onEvent({ type: "disconnected" });
      this.scheduleReconnect();
    };
  }

  send(command: Command): void {
    this.socket?.send(JSON.stringify(command));
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.clearStaleTimer();
    this.socket?.close();
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    const backoff = Math.min(
      1000 * 2 ** this.attempts,
      this.options.maxBackoffMs ?? 30000,
    );
    this.attempts += 1;
    this.reconnectTimer = setTimeout(() => this.connect(), backoff);
  }

  private armStaleTimer(): void {
    this.clearStaleTimer();
    this.staleTimer = setTimeout(
      () => this.options.onEvent({ type: "stale" }),
      this.options.staleAfterMs ?? 10000,
    );
  }

  private clearStaleTimer(): void {
    if (this.staleTimer !== null) {
      clearTimeout(this.staleTimer);
      this.staleTimer = null;
    }
  }
}
