"""Byte-exact wire protocol to the belt, plus a mock device.

Frame layout (9 bytes):

    0xAA | seq | duty[0..5] | checksum

``seq`` is a wrapping 8-bit counter, each duty byte is the amplitude
quantized as round-half-up(255 * y), and the checksum is the XOR of seq
and all duty bytes.  A receiver resynchronizes by scanning for 0xAA and
discarding bytes that fail the checksum.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from tactorbelt.amplitude import AmplitudeVector
from tactorbelt.clock import Clock, MonotonicClock
from tactorbelt.dynamics import StimulusWaveform

__all__ = [
    "SYNC_BYTE",
    "FRAME_SIZE",
    "BadChecksumError",
    "TruncatedFrameError",
    "DeviceGoneError",
    "encode_frame",
    "decode_frame",
    "quantize",
    "FrameParser",
    "MockDevice",
    "PlaybackHandle",
    "stream_waveform",
    "open_device",
]

SYNC_BYTE = 0xAA
TACTOR_CHANNELS = 6
FRAME_SIZE = 1 + 1 + TACTOR_CHANNELS + 1


class BadChecksumError(ValueError):
    """Frame failed its checksum; skip to the next sync byte."""


class TruncatedFrameError(ValueError):
    """Not enough bytes for a full frame; wait for more input."""


class DeviceGoneError(OSError):
    """The device sink failed mid-stream."""


def _duty(y: float) -> int:
    return int(255.0 * y + 0.5)  # round half up


def quantize(v: AmplitudeVector) -> AmplitudeVector:
    """Amplitudes as the device will reproduce them (8-bit duty grid)."""
    return AmplitudeVector(tuple(_duty(y) / 255.0 for y in v))


def encode_frame(v: AmplitudeVector, seq: int) -> bytes:
    """Encode one amplitude frame; deterministic for given inputs."""
    if len(v) != TACTOR_CHANNELS:
        raise ValueError(f"expected {TACTOR_CHANNELS} channels, got {len(v)}")
    seq &= 0xFF
    duty = bytes(_duty(y) for y in v)
    checksum = seq
    for b in duty:
        checksum ^= b
    return bytes([SYNC_BYTE, seq]) + duty + bytes([checksum])


def decode_frame(buf: bytes | bytearray) -> tuple[AmplitudeVector, int]:
    """Decode the frame at the start of ``buf``.

    The first byte must be the sync byte; callers scanning a stream
    should locate it first (see FrameParser).
    """
    if len(buf) < FRAME_SIZE:
        raise TruncatedFrameError(f"need {FRAME_SIZE} bytes, have {len(buf)}")
    if buf[0] != SYNC_BYTE:
        raise ValueError(f"frame does not start with sync byte 0x{SYNC_BYTE:02X}")
    seq = buf[1]
    duty = buf[2 : 2 + TACTOR_CHANNELS]
    checksum = buf[2 + TACTOR_CHANNELS]
    expect = seq
    for b in duty:
        expect ^= b
    if checksum != expect:
        raise BadChecksumError(f"checksum 0x{checksum:02X} != 0x{expect:02X}")
    return AmplitudeVector(tuple(b / 255.0 for b in duty)), seq


class FrameParser:
    """Incremental stream parser with resynchronization.

    Feed arbitrary byte chunks; complete valid frames come back in
    order.  Garbage and corrupted frames are skipped by scanning for
    the next sync byte.
    """

    def __init__(self) -> None:
        self._buf = bytearray()
        self.bad_checksums = 0
        self.skipped_bytes = 0

    def feed(self, data: bytes) -> list[tuple[AmplitudeVector, int]]:
        self._buf.extend(data)
        frames = []
        while True:
            start = self._buf.find(bytes([SYNC_BYTE]))
            if start < 0:
                self.skipped_bytes += len(self._buf)
                self._buf.clear()
                break
            if start > 0:
                self.skipped_bytes += start
                del self._buf[:start]
            if len(self._buf) < FRAME_SIZE:
                break
            try:
                frames.append(decode_frame(self._buf[:FRAME_SIZE]))
            except BadChecksumError:
                # false sync or corruption: drop this sync byte, rescan
                self.bad_checksums += 1
                self.skipped_bytes += 1
                del self._buf[:1]
                continue
            del self._buf[:FRAME_SIZE]
        return frames

    @property
    def pending_bytes(self) -> int:
        return len(self._buf)


class DeviceSink(Protocol):
    def write(self, data: bytes) -> None: ...

    def close(self) -> None: ...


@dataclass
class LoggedFrame:
    t_ms: float
    seq: int
    duty: tuple[int, ...]


class MockDevice:
    """Records every decoded frame with a timestamp; detects seq gaps."""

    def __init__(self, clock: Clock | None = None, log_path: str | Path | None = None):
        self.clock: Clock = clock if clock is not None else MonotonicClock()
        self._parser = FrameParser()
        self.frames: list[LoggedFrame] = []
        self.gaps: list[tuple[int, int]] = []  # (expected_seq, got_seq)
        self._log_path = Path(log_path) if log_path else None
        self._lock = threading.Lock()
        self.closed = False

    def write(self, data: bytes) -> None:
        if self.closed:
            raise DeviceGoneError("mock device is closed")
        now = self.clock.now_ms()
        with self._lock:
            for v, seq in self._parser.feed(data):
                if self.frames:
                    expected = (self.frames[-1].seq + 1) & 0xFF
                    if seq != expected:
                        self.gaps.append((expected, seq))
                self.frames.append(
                    LoggedFrame(t_ms=now, seq=seq, duty=tuple(_duty(y) for y in v))
                )

    def close(self) -> None:
        self.closed = True
        if self._log_path is not None:
            self._log_path.write_text(self.log_jsonl())

    def log_jsonl(self) -> str:
        """One decoded frame per line: {"t_ms": ..., "seq": ..., "duty": [6]}."""
        with self._lock:
            return "".join(
                json.dumps({"t_ms": f.t_ms, "seq": f.seq, "duty": list(f.duty)}) + "\n"
                for f in self.frames
            )

    @property
    def bad_checksums(self) -> int:
        return self._parser.bad_checksums

    def intervals_ms(self) -> list[float]:
        return [
            b.t_ms - a.t_ms for a, b in zip(self.frames, self.frames[1:])
        ]


@dataclass
class PlaybackHandle:
    """Control and stats for a running waveform stream."""

    frame_rate_hz: float
    frames_sent: int = 0
    max_lateness_ms: float = 0.0
    error: Exception | None = None
    _stop: threading.Event = field(default_factory=threading.Event)
    _thread: threading.Thread | None = None

    def stop(self) -> None:
        self._stop.set()

    def join(self, timeout_s: float | None = None) -> None:
        if self._thread is not None:
            self._thread.join(timeout_s)

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()


def stream_waveform(
    waveform: StimulusWaveform,
    sink: DeviceSink,
    clock: Clock | None = None,
    repeat: int = 1,
    start_seq: int = 0,
    background: bool = True,
) -> PlaybackHandle:
    """Emit waveform frames to ``sink`` at the waveform's frame rate.

    Frames are scheduled against absolute deadlines on the monotonic
    clock, so a late tick does not shift subsequent ones.  ``repeat=0``
    loops until stopped.  A sink write failure ends playback with the
    partial count; the handle carries the error.
    """
    clock = clock if clock is not None else MonotonicClock()
    handle = PlaybackHandle(frame_rate_hz=waveform.frame_rate_hz)
    interval = waveform.frame_interval_ms

    def run() -> None:
        seq = start_seq & 0xFF
        origin = clock.now_ms()
        tick = 0
        cycle = 0
        try:
            while not handle._stop.is_set():
                if repeat and cycle >= repeat:
                    break
                for frame in waveform.frames:
                    if handle._stop.is_set():
                        return
                    deadline = origin + tick * interval
                    clock.sleep_until_ms(deadline)
                    late = clock.now_ms() - deadline
                    if late > handle.max_lateness_ms:
                        handle.max_lateness_ms = late
                    try:
                        sink.write(encode_frame(frame, seq))
                    except Exception as exc:
                        raise DeviceGoneError(str(exc)) from exc
                    handle.frames_sent += 1
                    seq = (seq + 1) & 0xFF
                    tick += 1
                cycle += 1
        except DeviceGoneError as exc:
            handle.error = exc

    if background:
        thread = threading.Thread(target=run, name="tactorbelt-playback", daemon=True)
        handle._thread = thread
        thread.start()
    else:
        run()
    return handle


def open_device(uri: str, clock: Clock | None = None) -> DeviceSink:
    """Open a device sink from a URI.

    ``mock:`` yields an in-memory mock device; ``mock:/path.jsonl``
    additionally writes its decoded-frame log there on close.  Any
    other value is treated as a path to a writable byte stream (e.g. a
    serial device node).
    """
    if uri.startswith("mock:"):
        log_path = uri[len("mock:"):] or None
        return MockDevice(clock=clock, log_path=log_path)
    return open(uri, "wb", buffering=0)
