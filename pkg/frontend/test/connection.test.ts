import { beforeEach, describe, expect, it, vi } from "vitest";

import { ConsoleConnection, SocketLike } from "../src/connection.js";
import { ServerMessage } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  readyState = 0;
  sentFrames: string[] = [];
  private listeners = new Map<string, Array<(ev?: unknown) => void>>();

  addEventListener(type: string, fn: (ev?: unknown) => void): void {
    const list = this.listeners.get(type) ?? [];
    list.push(fn);
    this.listeners.set(type, list);
  }

  emit(type: string, ev?: unknown): void {
    for (const fn of this.listeners.get(type) ?? []) fn(ev);
  }

  send(data: string): void {
    this.sentFrames.push(data);
  }

  close(): void {
    this.emit("close");
  }

  open(): void {
    this.readyState = 1;
    this.emit("open");
  }
}

describe("ConsoleConnection", () => {
  let sockets: FakeSocket[];
  let statuses: string[];
  let messages: ServerMessage[];

  beforeEach(() => {
    vi.useFakeTimers();
    sockets = [];
    statuses = [];
    messages = [];
  });

  function make(base = 100, max = 800): ConsoleConnection {
    return new ConsoleConnection("ws://test", {
      socketFactory: () => {
        const s = new FakeSocket();
        sockets.push(s);
        return s;
      },
      backoffBaseMs: base,
      backoffMaxMs: max,
      onStatus: (s) => statuses.push(s),
      onMessage: (m) => messages.push(m),
    });
  }

  it("reports open after the socket opens", () => {
    const conn = make();
    conn.connect();
    expect(statuses).toEqual(["connecting"]);
    sockets[0]!.open();
    expect(conn.status).toBe("open");
  });

  it("delivers parsed messages and drops malformed ones", () => {
    const conn = make();
    conn.connect();
    sockets[0]!.open();
    sockets[0]!.emit("message", { data: JSON.stringify({ type: "sample", t: 1, mag: 2, phase: 3 }) });
    sockets[0]!.emit("message", { data: "garbage{{{" });
    sockets[0]!.emit("message", { data: JSON.stringify({ type: "unknown" }) });
    expect(messages).toEqual([{ type: "sample", t: 1, mag: 2, phase: 3 }]);
  });

  it("reconnects with capped exponential backoff", () => {
    const conn = make(100, 400);
    conn.connect();
    sockets[0]!.open();
    sockets[0]!.emit("close");
    expect(conn.status).toBe("disconnected");

    vi.advanceTimersByTime(99);
    expect(sockets).toHaveLength(1);
    vi.advanceTimersByTime(1); // first retry after base delay
    expect(sockets).toHaveLength(2);

    sockets[1]!.emit("close"); // fails again -> 200ms
    vi.advanceTimersByTime(200);
    expect(sockets).toHaveLength(3);
    sockets[2]!.emit("close"); // -> 400ms (cap)
    vi.advanceTimersByTime(400);
    expect(sockets).toHaveLength(4);
    sockets[3]!.emit("close"); // capped at 400ms
    vi.advanceTimersByTime(400);
    expect(sockets).toHaveLength(5);

    sockets[4]!.open();
    expect(conn.status).toBe("open");
  });

  it("send only works while open", () => {
    const conn = make();
    expect(conn.send({ type: "label_end" })).toBe(false);
    conn.connect();
    sockets[0]!.open();
    expect(conn.send({ type: "label_end" })).toBe(true);
    expect(sockets[0]!.sentFrames).toEqual([JSON.stringify({ type: "label_end" })]);
  });

  it("close by user stops the retry loop", () => {
    const conn = make();
    conn.connect();
    sockets[0]!.open();
    conn.close();
    vi.advanceTimersByTime(10_000);
    expect(sockets).toHaveLength(1);
    expect(conn.status).toBe("disconnected");
  });
});
