import { describe, expect, it } from "vitest";

import { RollingBuffer } from "../src/buffer.js";

const s = (t: number) => ({ t, mag: t * 0.1, phase: -t * 0.01 });

describe("RollingBuffer", () => {
  it("keeps samples in order and counts them", () => {
    const buf = new RollingBuffer(60_000);
    for (let t = 0; t < 1000; t += 50) buf.push(s(t));
    expect(buf.count).toBe(20);
    expect(buf.lastT).toBe(950);
  });

  it("drops duplicate and older timestamps (reconnect replay)", () => {
    const buf = new RollingBuffer(60_000);
    expect(buf.push(s(100))).toBe(true);
    expect(buf.push(s(150))).toBe(true);
    expect(buf.push(s(150))).toBe(false);
    expect(buf.push(s(120))).toBe(false);
    expect(buf.push(s(200))).toBe(true);
    expect(buf.all().map((x) => x.t)).toEqual([100, 150, 200]);
  });

  it("evicts samples older than the span", () => {
    const buf = new RollingBuffer(1_000);
    for (let t = 0; t <= 3_000; t += 100) buf.push(s(t));
    const ts = buf.all().map((x) => x.t);
    expect(Math.min(...ts)).toBeGreaterThanOrEqual(2_000);
    expect(Math.max(...ts)).toBe(3_000);
  });

  it("clear empties the buffer", () => {
    const buf = new RollingBuffer();
    buf.push(s(1));
    buf.clear();
    expect(buf.count).toBe(0);
    expect(buf.push(s(1))).toBe(true);
  });
});
