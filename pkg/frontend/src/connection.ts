// Engine connection: frames out, telemetry in, control round trips with
// acknowledgement tracking. The socket factory is injectable so the logic
// is testable without a server.

import { parseEngineMessage, type Ack, type EngineMessage } from "./telemetry.js";
import type { FrameRecord } from "./wire.js";
import { serializeRecord } from "./wire.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  readyState: number;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

const OPEN = 1;

export interface ConnectionCallbacks {
  onMessage?: (message: EngineMessage) => void;
  onStatus?: (connected: boolean) => void;
}

export interface ControlResult {
  ok: boolean;
  ack?: Ack;
  timedOut?: boolean;
}

export class EngineConnection {
  private socket: SocketLike | null = null;
  private closed = false;
  private retryMs = 1000;
  private pendingAcks = new Map<string, (result: ControlResult) => void>();
  /** Frames dropped while the engine was unreachable. */
  droppedFrames = 0;
  sentFrames = 0;

  constructor(
    private readonly url: string,
    private readonly callbacks: ConnectionCallbacks = {},
    private readonly socketFactory: SocketFactory = (u) =>
      new WebSocket(u) as unknown as SocketLike,
    private readonly ackTimeoutMs = 1000,
  ) {}

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === OPEN;
  }

  open(): void {
    if (this.closed) return;
    const socket = this.socketFactory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.retryMs = 1000;
      this.callbacks.onStatus?.(true);
    };
    socket.onmessage = (ev) => {
      if (typeof ev.data !== "string") return;
      const message = parseEngineMessage(ev.data);
      if (message.kind === "ack") this.resolveAck(message.ack);
      this.callbacks.onMessage?.(message);
    };
    socket.onclose = () => {
      this.callbacks.onStatus?.(false);
      this.failPendingAcks();
      if (!this.closed) {
        setTimeout(() => this.open(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 8000);
      }
    };
    socket.onerror = () => {
      // onclose follows and owns the reconnect.
    };
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
    this.failPendingAcks();
  }

  /** Fire-and-forget: capture never blocks on the engine. */
  sendFrame(record: FrameRecord): boolean {
    if (!this.connected) {
      this.droppedFrames += 1;
      return false;
    }
    this.socket!.send(serializeRecord(record));
    this.sentFrames += 1;
    return true;
  }

  /** Send a control record; resolves with the engine's acknowledgement or
   * a timeout so the UI can revert optimistic state. */
  sendControl(cmd: string, params: Record<string, unknown> = {}): Promise<ControlResult> {
    if (!this.connected) {
      return Promise.resolve({ ok: false, timedOut: false });
    }
    this.socket!.send(JSON.stringify({ cmd, ...params }));
    return new Promise((resolve) => {
      const timer = setTimeout(() => {
        this.pendingAcks.delete(cmd);
        resolve({ ok: false, timedOut: true });
      }, this.ackTimeoutMs);
      this.pendingAcks.set(cmd, (result) => {
        clearTimeout(timer);
        resolve(result);
      });
    });
  }

  private resolveAck(ack: Ack): void {
    const pending = this.pendingAcks.get(ack.ack);
    if (pending) {
      this.pendingAcks.delete(ack.ack);
      pending({ ok: ack.ok, ack });
    }
  }

  private failPendingAcks(): void {
    for (const [cmd, pending] of [...this.pendingAcks]) {
      this.pendingAcks.delete(cmd);
      pending({ ok: false, timedOut: true });
    }
  }
}
