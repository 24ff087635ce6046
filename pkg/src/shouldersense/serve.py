"""WebSocket streaming endpoint for live monitoring and labeled recording.

Serves one frame source (a replayed session file or an endless simulated
subject) to any number of subscribers as JSON text messages, and lets a
single controlling client run a labeled session that is persisted as a
normal session file with provenance "live-console".

Message schema (one JSON object per message):
    server -> client: {"type":"sample","t":ms,"mag":ohms,"phase":deg}
                      {"type":"ack","event":...,...}
                      {"type":"error","msg":...}
    client -> server: {"type":"start_session","subject":id}
                      {"type":"label_start","class":code}
                      {"type":"label_end"}
                      {"type":"stop_session"}
"""

from __future__ import annotations

import asyncio
import itertools
import json
import os
from dataclasses import dataclass, field

from websockets.asyncio.server import serve

from .config import RunConfig, derive_seed
from .impedance import GestureClass
from .simulate import NoiseModel, build_script, generate_subject, synthesize
from .wire import SampleFrame, SessionRecord, load_session


def replay_frames(record: SessionRecord):
    yield from record.frames


def live_frames(seed: int, rate: float, reps_per_chunk: int = 2):
    """Endless frame generator: successive short scripted sittings of one
    simulated subject, restitched onto a continuous timeline."""
    profile = generate_subject(derive_seed(seed, 0x11FE))
    noise = NoiseModel.defaults_for(profile)
    period_ms = 1000.0 / rate
    counter = 0
    offset_ms = 0
    for chunk in itertools.count():
        script = build_script(reps_per_chunk, seed=derive_seed(seed, chunk))
        stream = synthesize(profile, script, noise, rate=rate,
                            seed=derive_seed(seed, chunk, 1))
        for i in range(len(stream)):
            yield SampleFrame(counter=counter,
                              timestamp_ms=offset_ms + int(stream.timestamps_ms[i]),
                              magnitude=float(stream.magnitude[i]),
                              phase=float(stream.phase[i]))
            counter += 1
        offset_ms += int(round(len(stream) * period_ms))


@dataclass
class _Recording:
    subject_id: int
    frames: list = field(default_factory=list)
    labels: list = field(default_factory=list)  # closed [cls, start, end]
    open_label: tuple[int, int] | None = None   # (class code, start_ms)


class StreamServer:
    """One frame pump, many subscribers, at most one session controller."""

    def __init__(self, config: RunConfig, frames, sample_rate: float):
        self.config = config
        self.frames = iter(frames)
        self.sample_rate = sample_rate
        self.speed = config.serve.speed
        self.await_start = config.serve.await_start
        self.out_dir = config.serve.out_dir
        self.clients: set = set()
        self.controller = None
        self.recording: _Recording | None = None
        self.position_ms: int | None = None
        self.session_counter = 0
        self.saved_paths: list[str] = []
        self._started = asyncio.Event()
        self._client_seen = asyncio.Event()
        self.frames_sent = 0

    async def _broadcast(self, message: dict) -> None:
        dead = []
        payload = json.dumps(message)
        for ws in list(self.clients):  # handlers mutate the set mid-await
            try:
                await ws.send(payload)
            except Exception:
                dead.append(ws)
        for ws in dead:
            self.clients.discard(ws)

    async def pump(self) -> None:
        await self._client_seen.wait()
        if self.await_start:
            await self._started.wait()
        period = (1.0 / self.sample_rate) / self.speed
        loop = asyncio.get_running_loop()
        t0 = loop.time()
        for i, frame in enumerate(self.frames):
            target = t0 + i * period
            delay = target - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            self.position_ms = frame.timestamp_ms
            if self.recording is not None:
                self.recording.frames.append(frame)
            await self._broadcast({"type": "sample", "t": frame.timestamp_ms,
                                   "mag": frame.magnitude, "phase": frame.phase})
            self.frames_sent += 1
        await self._broadcast({"type": "ack", "event": "replay_complete",
                               "count": self.frames_sent})

    def _persist(self) -> str:
        rec = self.recording
        if rec.open_label is not None and self.position_ms is not None:
            code, start = rec.open_label
            rec.labels.append((code, start, self.position_ms))
            rec.open_label = None
        from .simulate import LabelInterval

        record = SessionRecord(
            subject_id=rec.subject_id,
            session_id=self.session_counter,
            sample_rate=self.sample_rate,
            frames=list(rec.frames),
            labels=[LabelInterval(GestureClass(c), s, e)
                    for c, s, e in rec.labels if e > s],
            provenance="live-console",
            meta={"config": self.config.to_dict()},
        )
        os.makedirs(self.out_dir, exist_ok=True)
        path = os.path.join(
            self.out_dir,
            f"live_subject{rec.subject_id}_session{self.session_counter}.ssn")
        from .wire import save_session

        save_session(record, path)
        self.saved_paths.append(path)
        self.session_counter += 1
        return path

    async def _handle_message(self, ws, msg: dict) -> dict:
        kind = msg.get("type")
        if kind == "start_session":
            if self.controller is not None and self.controller is not ws:
                return {"type": "error", "msg": "session control is held by another client"}
            if self.recording is not None:
                return {"type": "error", "msg": "a session is already running"}
            self.controller = ws
            self.recording = _Recording(subject_id=int(msg.get("subject", 0)))
            self._started.set()
            return {"type": "ack", "event": "start_session",
                    "subject": self.recording.subject_id}
        if kind in ("label_start", "label_end", "stop_session"):
            if ws is not self.controller:
                return {"type": "error", "msg": "not the session controller"}
            if self.recording is None:
                return {"type": "error", "msg": "no session running"}
        if kind == "label_start":
            if self.recording.open_label is not None:
                return {"type": "error", "msg": "a label is already open"}
            try:
                code = int(GestureClass(int(msg["class"])))
            except (KeyError, ValueError) as exc:
                return {"type": "error", "msg": f"bad class: {exc}"}
            start = self.position_ms if self.position_ms is not None else 0
            self.recording.open_label = (code, start)
            return {"type": "ack", "event": "label_start", "class": code, "t": start}
        if kind == "label_end":
            if self.recording.open_label is None:
                return {"type": "error", "msg": "no label open"}
            code, start = self.recording.open_label
            end = self.position_ms if self.position_ms is not None else start
            self.recording.open_label = None
            if end > start:
                self.recording.labels.append((code, start, end))
            return {"type": "ack", "event": "label_end", "class": code,
                    "start": start, "end": end}
        if kind == "stop_session":
            path = self._persist()
            rec_frames = len(self.recording.frames)
            rec_labels = len(self.recording.labels)
            self.recording = None
            return {"type": "ack", "event": "stop_session", "path": path,
                    "frames": rec_frames, "labels": rec_labels}
        return {"type": "error", "msg": f"unknown message type {kind!r}"}

    async def handler(self, ws) -> None:
        self.clients.add(ws)
        self._client_seen.set()
        try:
            async for raw in ws:
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        raise ValueError("message must be a JSON object")
                except ValueError as exc:
                    await ws.send(json.dumps({"type": "error", "msg": f"malformed: {exc}"}))
                    continue
                try:
                    reply = await self._handle_message(ws, msg)
                except Exception as exc:  # never kill the stream on a bad request
                    reply = {"type": "error", "msg": f"{type(exc).__name__}: {exc}"}
                await ws.send(json.dumps(reply))
        finally:
            self.clients.discard(ws)
            if ws is self.controller:
                self.controller = None
                if self.recording is not None:
                    self._persist()
                    self.recording = None

    async def run(self, host: str, port: int, ready: asyncio.Event | None = None,
                  stop: asyncio.Event | None = None) -> None:
        async with serve(self.handler, host, port) as server:
            pump_task = asyncio.create_task(self.pump())
            if ready is not None:
                ready.set()
            try:
                if stop is not None:
                    await stop.wait()
                else:
                    await asyncio.Future()
            finally:
                pump_task.cancel()
                server.close(close_connections=True)


def build_server(config: RunConfig) -> StreamServer:
    serve_cfg = config.serve
    if serve_cfg.source == "replay":
        if not serve_cfg.session_path:
            raise ValueError("replay source needs serve.session_path")
        record = load_session(serve_cfg.session_path)
        return StreamServer(config, replay_frames(record), record.sample_rate)
    if serve_cfg.source == "live":
        rate = config.simulate.sample_rate
        return StreamServer(config, live_frames(config.seed, rate), rate)
    raise ValueError(f"unknown serve source {serve_cfg.source!r}")


def run_server(config: RunConfig) -> None:
    server = build_server(config)
    asyncio.run(server.run(config.serve.host, config.serve.port))
