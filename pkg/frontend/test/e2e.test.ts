// End-to-end operator run against the real streaming server: replayed
// session at 4x speed; start, one ~2s Boredom hold, stop. The persisted
// session must carry exactly the source frames plus one label interval
// within ±150 ms of the observed press span, and must load back through
// the Python ingestion path.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { ConsoleConnection, SocketLike } from "../src/connection.js";
import { RollingBuffer } from "../src/buffer.js";
import { ServerMessage } from "../src/protocol.js";
import { SessionController } from "../src/session.js";

const PKG_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");
const PYTHON = process.env.PYTHON ?? "python3";
const PORT = 23000 + Math.floor(Math.random() * 2000);

let work: string;
let sessionFile: string;
let server: ChildProcess | null = null;

function py(args: string[], timeoutMs = 120_000): string {
  return execFileSync(PYTHON, args, {
    cwd: PKG_ROOT,
    timeout: timeoutMs,
    encoding: "utf-8",
  });
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "console-e2e-"));
  const config = join(work, "config.json");
  py(["-c", `
import json
json.dump({"seed": 11, "simulate": {"subjects": 1, "sessions": 1,
                                      "reps_per_gesture": 1}},
          open(${JSON.stringify(config)}, "w"))
`]);
  py(["-m", "shouldersense.cli", "simulate", "--config", config,
      "--out", join(work, "sessions")]);
  sessionFile = join(work, "sessions", "subject01_session1.ssn");

  server = spawn(PYTHON, [
    "-m", "shouldersense.cli", "serve",
    "--source", "replay", "--session", sessionFile,
    "--speed", "4", "--await-start",
    "--port", String(PORT), "--out", join(work, "live"),
  ], { cwd: PKG_ROOT, stdio: ["ignore", "pipe", "pipe"] });

  await new Promise<void>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("server did not start")), 20_000);
    server!.stdout!.on("data", (chunk: Buffer) => {
      if (chunk.toString().includes("serving")) {
        clearTimeout(timer);
        setTimeout(resolve, 300); // give the listener a beat
      }
    });
    server!.stderr!.on("data", (chunk: Buffer) => {
      process.stderr.write(chunk);
    });
  });
}, 120_000);

afterAll(() => {
  server?.kill();
});

describe("operator run against a replayed session at 4x", () => {
  it("persists source frames plus one press-span label", async () => {
    const buffer = new RollingBuffer(120_000);
    let pressT: number | null = null;
    let releaseT: number | null = null;
    let replayDone = false;

    const result = await new Promise<{ path: string }>((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("e2e timed out")), 90_000);

      const connection = new ConsoleConnection(`ws://127.0.0.1:${PORT}`, {
        socketFactory: (url) => new WebSocket(url) as unknown as SocketLike,
        onStatus: (status) => {
          if (status === "open") session.start(2);
        },
        onMessage: (msg: ServerMessage) => {
          if (msg.type === "sample") {
            buffer.push(msg);
            const t = msg.t;
            if (session.phase === "running") {
              // hold Boredom for ~2 s of stream time starting near t=2s
              if (pressT === null && t >= 2000) {
                pressT = t;
                session.labelDown(3);
              } else if (pressT !== null && releaseT === null && t >= pressT + 2000) {
                releaseT = t;
                session.labelUp();
              }
            }
          } else if (msg.type === "ack") {
            if (msg.event === "replay_complete") {
              replayDone = true;
              session.stop();
            } else {
              session.handleAck(msg);
              if (msg.event === "stop_session" && typeof msg.path === "string") {
                clearTimeout(timer);
                connection.close();
                resolve({ path: msg.path });
              }
            }
          } else {
            session.handleError(msg);
          }
        },
      });
      const session = new SessionController((msg) => connection.send(msg));
      connection.connect();
    });

    expect(replayDone).toBe(true);
    expect(pressT).not.toBeNull();
    expect(releaseT).not.toBeNull();

    // verify through the Python ingestion path: frames identical to the
    // source, exactly one Boredom interval matching the press span
    const verdict = JSON.parse(py(["-c", `
import json
from shouldersense.wire import load_session
rec = load_session(${JSON.stringify(result.path)})
src = load_session(${JSON.stringify(sessionFile)})
print(json.dumps({
    "frames_equal": [ (f.counter, f.timestamp_ms, f.magnitude, f.phase)
                      for f in rec.frames ]
                  == [ (f.counter, f.timestamp_ms, f.magnitude, f.phase)
                      for f in src.frames ],
    "n_frames": len(rec.frames),
    "provenance": rec.provenance,
    "labels": [[int(l.gesture), l.start_ms, l.end_ms] for l in rec.labels],
}))
`]));

    expect(verdict.provenance).toBe("live-console");
    expect(verdict.frames_equal).toBe(true);
    expect(verdict.labels).toHaveLength(1);
    const [cls, startMs, endMs] = verdict.labels[0];
    expect(cls).toBe(3); // Boredom
    expect(Math.abs(startMs - pressT!)).toBeLessThanOrEqual(150);
    expect(Math.abs(endMs - releaseT!)).toBeLessThanOrEqual(150);
    const span = endMs - startMs;
    const pressSpan = releaseT! - pressT!;
    expect(Math.abs(span - pressSpan)).toBeLessThanOrEqual(150);

    // the console's own view agrees with the persisted record
    expect(buffer.count).toBeGreaterThan(0);
  }, 120_000);
});
