// Session controller: turns operator actions into protocol messages and
// mirrors the server's acknowledged state. The interval list shown to the
// operator contains only server-confirmed labels; the console itself never
// invents timestamps or data.

import { AckMsg, ClientMessage, ErrorMsg } from "./protocol.js";

export interface LabelInterval {
  classCode: number;
  startMs: number;
  endMs: number;
}

export interface SessionResult {
  path: string;
  frames: number;
  labels: number;
}

export type SessionPhase = "idle" | "running" | "stopping";

type SendFn = (msg: ClientMessage) => void;

export class SessionController {
  phase: SessionPhase = "idle";
  /** class code of the label currently held open, if any */
  openLabel: number | null = null;
  intervals: LabelInterval[] = [];
  lastError: string | null = null;
  result: SessionResult | null = null;
  onChange: () => void = () => {};

  constructor(private readonly send: SendFn) {}

  private changed(): void {
    this.onChange();
  }

  start(subject: number): void {
    if (this.phase !== "idle") return;
    this.send({ type: "start_session", subject });
    this.changed();
  }

  stop(): void {
    if (this.phase !== "running") return;
    if (this.openLabel !== null) {
      this.labelUp();
    }
    this.phase = "stopping";
    this.send({ type: "stop_session" });
    this.changed();
  }

  /** Press-and-hold labeling: down opens the label... */
  labelDown(classCode: number): void {
    if (this.phase !== "running" || this.openLabel !== null) return;
    this.send({ type: "label_start", class: classCode });
    this.openLabel = classCode;
    this.changed();
  }

  /** ...and release closes it. */
  labelUp(): void {
    if (this.phase !== "running" || this.openLabel === null) return;
    this.send({ type: "label_end" });
    this.openLabel = null;
    this.changed();
  }

  /** Toggle mode: one tap opens, the next tap (any class) closes. */
  toggleLabel(classCode: number): void {
    if (this.openLabel === null) {
      this.labelDown(classCode);
    } else {
      this.labelUp();
    }
  }

  handleAck(msg: AckMsg): void {
    switch (msg.event) {
      case "start_session":
        this.phase = "running";
        this.intervals = [];
        this.result = null;
        this.lastError = null;
        break;
      case "label_end":
        if (
          typeof msg.class === "number" &&
          typeof msg.start === "number" &&
          typeof msg.end === "number" &&
          msg.end > msg.start
        ) {
          this.intervals.push({
            classCode: msg.class,
            startMs: msg.start,
            endMs: msg.end,
          });
        }
        break;
      case "stop_session":
        this.phase = "idle";
        this.openLabel = null;
        if (typeof msg.path === "string") {
          this.result = {
            path: msg.path,
            frames: typeof msg.frames === "number" ? msg.frames : 0,
            labels: typeof msg.labels === "number" ? msg.labels : 0,
          };
        }
        break;
      default:
        break; // label_start acks and informational acks need no state change
    }
    this.changed();
  }

  handleError(msg: ErrorMsg): void {
    this.lastError = msg.msg;
    this.changed();
  }
}
