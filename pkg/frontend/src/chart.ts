// Minimal scrolling line chart on a 2D canvas: one signal over the rolling
// window, auto-scaled vertically with a small margin.

import { RollingBuffer, Sample } from "./buffer.js";

export class ScrollingChart {
  private readonly ctx: CanvasRenderingContext2D;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly pick: (s: Sample) => number,
    private readonly spanMs: number = 60_000,
    private readonly color: string = "#2a7ae2",
  ) {
    const ctx = canvas.getContext("2d");
    if (ctx === null) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  render(buffer: RollingBuffer): void {
    const { width, height } = this.canvas;
    const ctx = this.ctx;
    ctx.clearRect(0, 0, width, height);
    const samples = buffer.all();
    if (samples.length < 2) return;

    const tEnd = samples[samples.length - 1]!.t;
    const tStart = tEnd - this.spanMs;
    let lo = Infinity;
    let hi = -Infinity;
    for (const s of samples) {
      const v = this.pick(s);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    if (hi === lo) {
      hi += 1;
      lo -= 1;
    }
    const pad = 0.08 * (hi - lo);
    lo -= pad;
    hi += pad;

    ctx.strokeStyle = this.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let started = false;
    for (const s of samples) {
      const x = ((s.t - tStart) / this.spanMs) * width;
      const y = height - ((this.pick(s) - lo) / (hi - lo)) * height;
      if (started) {
        ctx.lineTo(x, y);
      } else {
        ctx.moveTo(x, y);
        started = true;
      }
    }
    ctx.stroke();

    ctx.fillStyle = "#555";
    ctx.font = "11px sans-serif";
    ctx.fillText(hi.toFixed(1), 4, 12);
    ctx.fillText(lo.toFixed(1), 4, height - 4);
  }
}
