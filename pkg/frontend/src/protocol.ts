// Message schema of the streaming endpoint. One JSON object per WebSocket
// text message, both directions.

export interface SampleMsg {
  type: "sample";
  t: number; // stream timestamp, ms
  mag: number; // ohms
  phase: number; // degrees
}

export interface AckMsg {
  type: "ack";
  event: string;
  [key: string]: unknown;
}

export interface ErrorMsg {
  type: "error";
  msg: string;
}

export type ServerMessage = SampleMsg | AckMsg | ErrorMsg;

export type ClientMessage =
  | { type: "start_session"; subject: number }
  | { type: "label_start"; class: number }
  | { type: "label_end" }
  | { type: "stop_session" };

export const GESTURES: ReadonlyArray<{ code: number; name: string }> = [
  { code: 0, name: "Null" },
  { code: 1, name: "Mouth guard" },
  { code: 2, name: "Pinch nose bridge" },
  { code: 3, name: "Boredom" },
  { code: 4, name: "Interested" },
  { code: 5, name: "Forgetfulness" },
  { code: 6, name: "Making decision" },
];

const isFiniteNumber = (v: unknown): v is number =>
  typeof v === "number" && Number.isFinite(v);

/** Parse one server message; returns null for anything malformed so a bad
 * frame can never take the console down. */
export function parseServerMessage(raw: unknown): ServerMessage | null {
  if (typeof raw !== "string") return null;
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  switch (msg.type) {
    case "sample":
      if (isFiniteNumber(msg.t) && isFiniteNumber(msg.mag) && isFiniteNumber(msg.phase)) {
        return { type: "sample", t: msg.t, mag: msg.mag, phase: msg.phase };
      }
      return null;
    case "ack":
      if (typeof msg.event === "string") {
        return msg as unknown as AckMsg;
      }
      return null;
    case "error":
      if (typeof msg.msg === "string") {
        return { type: "error", msg: msg.msg };
      }
      return null;
    default:
      return null;
  }
}
