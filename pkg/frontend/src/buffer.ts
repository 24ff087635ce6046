// Rolling sample store backing the scrolling charts: keeps the most recent
// span of samples, ordered by timestamp, with duplicates dropped so a
// reconnect that replays the last few samples cannot double-plot them.

export interface Sample {
  t: number;
  mag: number;
  phase: number;
}

export class RollingBuffer {
  private samples: Sample[] = [];

  constructor(private readonly spanMs: number = 60_000) {}

  /** Returns true when the sample was accepted (newer than the last one). */
  push(sample: Sample): boolean {
    const last = this.samples[this.samples.length - 1];
    if (last !== undefined && sample.t <= last.t) {
      return false;
    }
    this.samples.push(sample);
    const cutoff = sample.t - this.spanMs;
    let drop = 0;
    while (drop < this.samples.length && this.samples[drop]!.t < cutoff) {
      drop++;
    }
    if (drop > 0) {
      this.samples.splice(0, drop);
    }
    return true;
  }

  get count(): number {
    return this.samples.length;
  }

  get lastT(): number | undefined {
    return this.samples[this.samples.length - 1]?.t;
  }

  /** Snapshot of the retained samples, oldest first. */
  all(): ReadonlyArray<Sample> {
    return this.samples;
  }

  clear(): void {
    this.samples = [];
  }
}
