// WebSocket wrapper with automatic reconnect and capped exponential
// backoff. The socket implementation is injectable so tests (and the node
// e2e harness) can supply `ws` while the browser uses its native WebSocket.

import { ClientMessage, parseServerMessage, ServerMessage } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "close" | "error", fn: () => void): void;
  addEventListener(type: "message", fn: (ev: { data: unknown }) => void): void;
  readyState: number;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionStatus = "connecting" | "open" | "disconnected";

export interface ConnectionOptions {
  socketFactory?: SocketFactory;
  backoffBaseMs?: number;
  backoffMaxMs?: number;
  onMessage?: (msg: ServerMessage) => void;
  onStatus?: (status: ConnectionStatus) => void;
  setTimeoutFn?: typeof setTimeout;
}

const defaultFactory: SocketFactory = (url) =>
  new (globalThis as { WebSocket: new (u: string) => SocketLike }).WebSocket(url);

export class ConsoleConnection {
  status: ConnectionStatus = "disconnected";
  attempts = 0;

  private socket: SocketLike | null = null;
  private closedByUser = false;
  private backoffMs: number;
  private readonly factory: SocketFactory;
  private readonly base: number;
  private readonly max: number;
  private readonly setTimeoutFn: typeof setTimeout;

  constructor(private readonly url: string, private readonly opts: ConnectionOptions = {}) {
    this.factory = opts.socketFactory ?? defaultFactory;
    this.base = opts.backoffBaseMs ?? 500;
    this.max = opts.backoffMaxMs ?? 8000;
    this.backoffMs = this.base;
    this.setTimeoutFn = opts.setTimeoutFn ?? setTimeout;
  }

  private setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.opts.onStatus?.(status);
  }

  connect(): void {
    this.closedByUser = false;
    this.open();
  }

  private open(): void {
    this.attempts += 1;
    this.setStatus("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;

    socket.addEventListener("open", () => {
      this.backoffMs = this.base;
      this.setStatus("open");
    });
    socket.addEventListener("message", (ev) => {
      const msg = parseServerMessage(ev.data);
      if (msg !== null) {
        this.opts.onMessage?.(msg);
      }
    });
    socket.addEventListener("close", () => this.handleDown());
    socket.addEventListener("error", () => {
      // close always follows; reconnect is handled there
    });
  }

  private handleDown(): void {
    if (this.status === "disconnected" && this.closedByUser) return;
    this.setStatus("disconnected");
    this.socket = null;
    if (this.closedByUser) return;
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, this.max);
    this.setTimeoutFn(() => {
      if (!this.closedByUser) this.open();
    }, delay);
  }

  send(msg: ClientMessage): boolean {
    if (this.socket === null || this.status !== "open") {
      return false;
    }
    this.socket.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    this.closedByUser = true;
    this.socket?.close();
    this.socket = null;
    this.setStatus("disconnected");
  }
}
