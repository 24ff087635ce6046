"""Device-link frame format, stream synchronization and session files.

The byte format stands in for the radio link: 20-byte frames with a two-byte
sync mark, little-endian fields and a CRC-16/CCITT-FALSE trailer, so the
ingestion path is testable bit-exactly. Session files are line-delimited
text (one tagged line per frame/label) so live sessions can append while
the file stays diffable.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .impedance import GestureClass
from .simulate import LabeledStream, LabelInterval

SYNC = b"\xa5\x5a"
FRAME_LEN = 20
SCHEMA_VERSION = 1

_PAYLOAD = struct.Struct("<IIff")  # counter, timestamp_ms, magnitude, phase
_CRC = struct.Struct("<H")


class BadSyncError(ValueError):
    """Frame does not start with the sync mark."""


class BadCrcError(ValueError):
    """Frame payload fails its CRC check."""


class EmptyStreamError(ValueError):
    pass


class SchemaMismatchError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _crc16_table(poly: int = 0x1021) -> list[int]:
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ poly) if crc & 0x8000 else (crc << 1)
        table.append(crc & 0xFFFF)
    return table


_CRC16_TABLE = _crc16_table()


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout."""
    crc = 0xFFFF
    for byte in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC16_TABLE[(crc >> 8) ^ byte]
    return crc


@dataclass(frozen=True)
class SampleFrame:
    """One reading as carried on the link. magnitude/phase travel as 32-bit
    floats; values that are not float32-representable are quantized by the
    codec."""

    counter: int
    timestamp_ms: int
    magnitude: float
    phase: float

    def quantized(self) -> "SampleFrame":
        return SampleFrame(self.counter, self.timestamp_ms,
                           float(np.float32(self.magnitude)),
                           float(np.float32(self.phase)))


def encode_frame(frame: SampleFrame) -> bytes:
    payload = _PAYLOAD.pack(frame.counter & 0xFFFFFFFF,
                            frame.timestamp_ms & 0xFFFFFFFF,
                            frame.magnitude, frame.phase)
    return SYNC + payload + _CRC.pack(crc16_ccitt_false(payload))


def decode_frame(data: bytes) -> SampleFrame:
    if len(data) < FRAME_LEN:
        raise ValueError(f"need {FRAME_LEN} bytes, got {len(data)}")
    if data[:2] != SYNC:
        raise BadSyncError(f"expected {SYNC.hex()} at frame start, got {data[:2].hex()}")
    payload, (crc,) = data[2:18], _CRC.unpack(data[18:20])
    if crc16_ccitt_false(payload) != crc:
        raise BadCrcError("payload CRC mismatch")
    counter, ts, mag, phase = _PAYLOAD.unpack(payload)
    return SampleFrame(counter, ts, mag, phase)


@dataclass
class DecodeReport:
    frames: int = 0
    bad_crc: int = 0
    skipped_bytes: int = 0


def decode_stream(data: bytes) -> tuple[list[SampleFrame], DecodeReport]:
    """Decode a byte stream, resynchronizing on the sync mark after garbage
    and dropping (but counting) frames with bad CRCs."""
    frames: list[SampleFrame] = []
    report = DecodeReport()
    pos = 0
    while pos + FRAME_LEN <= len(data):
        if data[pos:pos + 2] != SYNC:
            nxt = data.find(SYNC, pos + 1)
            if nxt == -1:
                report.skipped_bytes += len(data) - pos
                return frames, report
            report.skipped_bytes += nxt - pos
            pos = nxt
            continue
        try:
            frames.append(decode_frame(data[pos:pos + FRAME_LEN]))
            report.frames += 1
            pos += FRAME_LEN
        except BadCrcError:
            report.bad_crc += 1
            pos += FRAME_LEN
    return frames, report


@dataclass
class GapReport:
    """Grid points where no input sample was within one grid period; their
    values were held from the last sample before the gap."""

    held_indices: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.held_indices)


def synchronize_stream(frames: list[SampleFrame], target_rate: float,
                       ) -> tuple[list[SampleFrame], GapReport]:
    """Resample onto an exact 1000/target_rate ms grid from the first
    timestamp. Each grid point takes the nearest input sample by timestamp
    (ties to the earlier sample); grid points inside input gaps longer than
    two grid periods hold the preceding value and are flagged."""
    if not frames:
        raise EmptyStreamError("cannot synchronize an empty stream")
    ts = np.asarray([f.timestamp_ms for f in frames], dtype=np.float64)
    if np.any(np.diff(ts) < 0):
        raise ValueError("input timestamps must be non-decreasing")
    period = 1000.0 / target_rate
    span = ts[-1] - ts[0]
    n_out = int(np.floor(span / period + 1e-9)) + 1
    grid = ts[0] + np.arange(n_out) * period

    # nearest input sample per grid point, ties toward the earlier sample
    right = np.searchsorted(ts, grid, side="left")
    left = np.clip(right - 1, 0, len(ts) - 1)
    right = np.clip(right, 0, len(ts) - 1)
    d_left = np.abs(grid - ts[left])
    d_right = np.abs(ts[right] - grid)
    pick = np.where(d_left <= d_right, left, right)

    dist = np.minimum(d_left, d_right)
    gap_mask = dist >= period - 1e-9
    # held grid points take the last sample before them, not a future one
    before = np.clip(np.searchsorted(ts, grid, side="right") - 1, 0, len(ts) - 1)
    pick = np.where(gap_mask, before, pick)

    out = [
        SampleFrame(counter=i,
                    timestamp_ms=int(round(grid[i])),
                    magnitude=frames[pick[i]].magnitude,
                    phase=frames[pick[i]].phase)
        for i in range(n_out)
    ]
    return out, GapReport(held_indices=np.nonzero(gap_mask)[0].tolist())


@dataclass
class SessionRecord:
    """The persisted artifact of one session: frames, labels, provenance."""

    subject_id: int
    session_id: int
    sample_rate: float
    frames: list[SampleFrame]
    labels: list[LabelInterval]
    provenance: str = "simulated"  # simulated | replayed | live-console
    schema_version: int = SCHEMA_VERSION
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_stream(cls, stream: LabeledStream, subject_id: int, session_id: int,
                    provenance: str = "simulated", meta: dict | None = None,
                    ) -> "SessionRecord":
        frames = [
            SampleFrame(counter=i, timestamp_ms=int(stream.timestamps_ms[i]),
                        magnitude=float(stream.magnitude[i]),
                        phase=float(stream.phase[i]))
            for i in range(len(stream))
        ]
        return cls(subject_id=subject_id, session_id=session_id,
                   sample_rate=stream.sample_rate, frames=frames,
                   labels=list(stream.labels), provenance=provenance,
                   meta=dict(meta or {}))

    def to_stream(self) -> LabeledStream:
        return LabeledStream(
            sample_rate=self.sample_rate,
            timestamps_ms=np.asarray([f.timestamp_ms for f in self.frames], dtype=np.int64),
            magnitude=np.asarray([f.magnitude for f in self.frames], dtype=np.float64),
            phase=np.asarray([f.phase for f in self.frames], dtype=np.float64),
            labels=list(self.labels),
        )


def save_session(record: SessionRecord, path) -> None:
    """Line-delimited text: one JSON header line (H), one line per frame (F),
    one line per label (L). Floats use repr so reloading is exact."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "schema_version": record.schema_version,
            "subject_id": record.subject_id,
            "session_id": record.session_id,
            "sample_rate": record.sample_rate,
            "provenance": record.provenance,
        }
        if record.meta:
            header["meta"] = record.meta
        fh.write("H " + json.dumps(header, sort_keys=True) + "\n")
        for f in record.frames:
            fh.write(f"F {f.counter} {f.timestamp_ms} {f.magnitude!r} {f.phase!r}\n")
        for lab in record.labels:
            fh.write(f"L {int(lab.gesture)} {lab.start_ms} {lab.end_ms}\n")


def load_session(path) -> SessionRecord:
    header = None
    frames: list[SampleFrame] = []
    labels: list[LabelInterval] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            tag, _, rest = line.partition(" ")
            try:
                if tag == "H":
                    header = json.loads(rest)
                elif tag == "F":
                    counter, ts, mag, phase = rest.split(" ")
                    frames.append(SampleFrame(int(counter), int(ts),
                                              float(mag), float(phase)))
                elif tag == "L":
                    code, start, end = rest.split(" ")
                    labels.append(LabelInterval(GestureClass(int(code)),
                                                int(start), int(end)))
                else:
                    raise ValueError(f"unknown line tag {tag!r}")
            except ParseError:
                raise
            except (ValueError, json.JSONDecodeError) as exc:
                raise ParseError(line_no, str(exc)) from exc
    if header is None:
        raise ParseError(1, "missing header line")
    if header.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"schema_version {header.get('schema_version')} != {SCHEMA_VERSION}")
    return SessionRecord(
        subject_id=header["subject_id"],
        session_id=header["session_id"],
        sample_rate=header["sample_rate"],
        frames=frames,
        labels=labels,
        provenance=header["provenance"],
        schema_version=header["schema_version"],
        meta=header.get("meta", {}),
    )
