"""Network-facing session host: HTTP control plane plus a per-session
bidirectional stream, driving the belt (mock or real) during trials.

Stream messages are UTF-8 JSON objects with a ``type`` field, one per
WebSocket message (the socket framing carries the length).  Downstream:
``trial_start``, ``frame`` (training only), ``trial_end``,
``session_complete``.  Upstream: ``cursor``, ``confirm``, ``abort``.
Cursor messages arriving outside a trial are discarded.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import queue
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse, Response
from pydantic import BaseModel

from tactorbelt.amplitude import FalloffParams
from tactorbelt.clock import Clock, MonotonicClock
from tactorbelt.dynamics import StimulusWaveform, render_waveform
from tactorbelt.experiment import (
    AcquisitionDetector,
    BetweenMode,
    CursorSample,
    Phase,
    PlannedTrial,
    SessionConfig,
    TrialRecord,
    compute_metrics,
    config_to_dict,
    metrics_to_dict,
    persist_session,
    plan_session,
)
from tactorbelt.geometry import TactorLayout, build_layout, build_target_set
from tactorbelt.perceiver import snap_to_target
from tactorbelt.protocol import DeviceSink, stream_waveform

__all__ = ["ServiceConfig", "SessionHost", "create_app", "ConflictError"]


class ConflictError(RuntimeError):
    """Illegal session state transition."""


@dataclass
class ServiceConfig:
    device_uri: str = "mock:"
    data_dir: Path = Path("sessions")
    layout: TactorLayout = field(default_factory=build_layout)
    per_gap: int = 3
    falloff: FalloffParams = FalloffParams()
    frame_rate_hz: float = 100.0


class SessionHost:
    """State machine for one session: idle -> trial_active -> ... -> complete.

    All mutations go through one lock; WS and HTTP handlers only call
    the public methods and broadcast whatever messages they return.
    """

    def __init__(
        self,
        session_id: str,
        config: SessionConfig,
        service: ServiceConfig,
        device: DeviceSink | None,
        clock: Clock | None = None,
    ) -> None:
        self.session_id = session_id
        self.config = config
        self.service = service
        self.device = device
        self.clock: Clock = clock if clock is not None else MonotonicClock()
        self.plan = plan_session(config)
        self.records: list[TrialRecord] = []
        self.aborted = False
        self._lock = threading.Lock()
        self._active: PlannedTrial | None = None
        self._detector: AcquisitionDetector | None = None
        self._trace: list[CursorSample] = []
        self._onset_ts = 0.0
        self._waveform: StimulusWaveform | None = None
        self._playback = None
        self._next_seq = 0
        self._outboxes: list[queue.SimpleQueue] = []

    # --- stream plumbing ---------------------------------------------------

    def attach(self) -> queue.SimpleQueue:
        box: queue.SimpleQueue = queue.SimpleQueue()
        with self._lock:
            self._outboxes.append(box)
        return box

    def detach(self, box: queue.SimpleQueue) -> None:
        with self._lock:
            if box in self._outboxes:
                self._outboxes.remove(box)

    def _broadcast(self, message: dict) -> None:
        for box in list(self._outboxes):
            box.put(message)

    # --- state -------------------------------------------------------------

    @property
    def trial_active(self) -> bool:
        return self._active is not None

    @property
    def complete(self) -> bool:
        return not self.aborted and len(self.records) == len(self.plan)

    def snapshot(self) -> dict:
        with self._lock:
            pending = None
            if not self.complete and not self.aborted:
                nxt = self._active or (
                    self.plan[len(self.records)]
                    if len(self.records) < len(self.plan)
                    else None
                )
                if nxt is not None:
                    pending = {"trial_id": nxt.trial_id, "mode": nxt.mode.value}
            return {
                "session_id": self.session_id,
                "phase": self.config.phase.value,
                "trial_index": len(self.records),
                "trial_count": len(self.plan),
                "trial_active": self.trial_active,
                "pending_trial": pending,
                "complete": self.complete,
                "aborted": self.aborted,
            }

    # --- trial lifecycle ---------------------------------------------------

    def start_next_trial(self) -> dict:
        with self._lock:
            if self.aborted:
                raise ConflictError("session was aborted")
            if self._active is not None:
                raise ConflictError("a trial is already active")
            if len(self.records) >= len(self.plan):
                raise ConflictError("session already complete")
            trial = self.plan[len(self.records)]
            waveform = render_waveform(
                trial.target,
                trial.mode,
                self.service.layout,
                self.service.falloff,
                frame_rate_hz=self.service.frame_rate_hz,
            )
            self._active = trial
            self._detector = AcquisitionDetector(
                self.config.target_set, self.config.acquisition
            )
            self._trace = []
            self._waveform = waveform
            self._onset_ts = self.clock.now_ms()
            self._start_playback(waveform)
            message = {
                "type": "trial_start",
                "trial_id": trial.trial_id,
                "phase": self.config.phase.value,
                "mode": waveform.mode.value,
                "onset_ts": self._onset_ts,
                "candidates": [t.angle_deg for t in self.config.target_set],
            }
            if self.config.phase is Phase.TRAINING:
                message["reveal"] = trial.target.angle_deg
            self._broadcast(message)
            return message

    def _start_playback(self, waveform: StimulusWaveform) -> None:
        if self.device is None:
            return
        self._playback = stream_waveform(
            waveform,
            self.device,
            clock=self.clock,
            repeat=0,
            start_seq=self._next_seq,
        )

    def _stop_playback(self) -> None:
        if self._playback is not None:
            self._playback.stop()
            self._playback.join(timeout_s=2.0)
            self._next_seq = (self._next_seq + self._playback.frames_sent) & 0xFF
            self._playback = None

    def feed_cursor(self, t_ms: float, x: float, y: float) -> dict | None:
        """Consume a cursor sample; returns the trial_end message if it fired."""
        with self._lock:
            if self._active is None or self._detector is None:
                return None  # outside a trial: discard
            sample = CursorSample(t_ms=t_ms, x=x, y=y)
            if sample.t_ms > self.config.trial_timeout_ms:
                return self._finish_trial_locked(None, None)
            try:
                self._trace.append(sample)
                hit = self._detector.push(sample)
            except ValueError:
                self._trace.pop()
                return None  # non-monotone sample: drop it
            if self.config.phase is Phase.TRAINING and self._waveform is not None:
                k = int(t_ms / self._waveform.frame_interval_ms)
                frame = self._waveform.frames[k % len(self._waveform.frames)]
                self._broadcast(
                    {"type": "frame", "t_ms": t_ms, "amplitudes": list(frame.values)}
                )
            if hit is None:
                return None
            return self._finish_trial_locked(hit[0], hit[1])

    def confirm(self) -> dict | None:
        """Manual selection: snap the latest cursor sample immediately."""
        with self._lock:
            if self._active is None or not self._trace:
                return None
            last = self._trace[-1]
            selected = snap_to_target(last.angle_deg, self.config.target_set)
            return self._finish_trial_locked(selected, last.t_ms)

    def abort_trial(self) -> dict:
        with self._lock:
            if self._active is None:
                raise ConflictError("no active trial")
            return self._finish_trial_locked(None, None)

    def abort_if_active(self) -> dict | None:
        with self._lock:
            if self._active is None:
                return None
            return self._finish_trial_locked(None, None)

    def _finish_trial_locked(self, selected, acquisition_ms) -> dict:
        trial = self._active
        assert trial is not None
        self._stop_playback()
        correct = selected is not None and selected.angle_deg == trial.target.angle_deg
        record = TrialRecord(
            trial_id=trial.trial_id,
            target=trial.target,
            mode=self._waveform.mode if self._waveform else trial.mode,
            onset_ts=self._onset_ts,
            cursor_trace=tuple(self._trace),
            selected=selected,
            acquisition_ms=acquisition_ms,
            correct=correct,
            phase=self.config.phase,
        )
        self.records.append(record)
        self._active = None
        self._detector = None
        self._waveform = None
        self._trace = []
        message = {
            "type": "trial_end",
            "trial_id": record.trial_id,
            "selected": None if selected is None else selected.angle_deg,
            "correct": record.correct,
            "rt_ms": record.acquisition_ms,
        }
        self._broadcast(message)
        if self.complete:
            self._persist()
            self._broadcast({"type": "session_complete", "session_id": self.session_id})
        return message

    def abort_session(self) -> None:
        with self._lock:
            if self._active is not None:
                self._finish_trial_locked(None, None)
            self.aborted = True
            self._persist()

    def metrics(self) -> dict:
        with self._lock:
            return metrics_to_dict(compute_metrics(self.records))

    def file_path(self) -> Path:
        return self.service.data_dir / f"session-{self.session_id}.jsonl"

    def _persist(self) -> None:
        self.service.data_dir.mkdir(parents=True, exist_ok=True)
        persist_session(
            self.records,
            compute_metrics(self.records),
            self.file_path(),
            self.config,
        )

    def persist_now(self) -> Path:
        with self._lock:
            self._persist()
        return self.file_path()


class CreateSessionRequest(BaseModel):
    repetitions: int = 5
    between_mode: str = "dynamic"
    phase: str = "testing"
    randomization_seed: int = 0
    trial_timeout_ms: float = 10_000.0
    inter_trial_gap_ms: float = 500.0


def create_app(service: ServiceConfig | None = None) -> FastAPI:
    service = service or ServiceConfig()
    app = FastAPI(title="tactorbelt service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    target_set = build_target_set(service.layout, per_gap=service.per_gap)
    device = _open_service_device(service)
    sessions: dict[str, SessionHost] = {}
    ids = itertools.count(1)
    state_lock = threading.Lock()
    app.state.service_config = service
    app.state.sessions = sessions
    app.state.device = device

    def get_session(session_id: str) -> SessionHost:
        host = sessions.get(session_id)
        if host is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return host

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest) -> dict:
        with state_lock:
            for host in sessions.values():
                if not host.complete and not host.aborted:
                    raise HTTPException(
                        status_code=409, detail="another session is active"
                    )
            try:
                config = SessionConfig.for_targets(
                    target_set,
                    repetitions=req.repetitions,
                    between_mode=BetweenMode(req.between_mode),
                    phase=Phase(req.phase),
                    randomization_seed=req.randomization_seed,
                    trial_timeout_ms=req.trial_timeout_ms,
                    inter_trial_gap_ms=req.inter_trial_gap_ms,
                )
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            session_id = str(next(ids))
            sessions[session_id] = SessionHost(
                session_id, config, service, device
            )
        return {
            "session_id": session_id,
            "trial_count": len(sessions[session_id].plan),
            "config": config_to_dict(config),
        }

    @app.get("/sessions/{session_id}")
    def session_state(session_id: str) -> dict:
        return get_session(session_id).snapshot()

    @app.post("/sessions/{session_id}/trials/next")
    def start_next(session_id: str) -> dict:
        try:
            return get_session(session_id).start_next_trial()
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.post("/sessions/{session_id}/trials/abort")
    def abort_trial(session_id: str) -> dict:
        try:
            return get_session(session_id).abort_trial()
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.post("/sessions/{session_id}/abort")
    def abort_session(session_id: str) -> dict:
        host = get_session(session_id)
        host.abort_session()
        return host.snapshot()

    @app.get("/sessions/{session_id}/metrics")
    def session_metrics(session_id: str) -> dict:
        return get_session(session_id).metrics()

    @app.get("/sessions/{session_id}/file")
    def session_file(session_id: str) -> Response:
        host = get_session(session_id)
        path = host.persist_now()
        return PlainTextResponse(
            path.read_text(), media_type="application/jsonl"
        )

    @app.websocket("/sessions/{session_id}/stream")
    async def session_stream(ws: WebSocket, session_id: str) -> None:
        host = sessions.get(session_id)
        if host is None:
            await ws.close(code=4404)
            return
        await ws.accept()
        box = host.attach()

        async def pump_outbox() -> None:
            while True:
                try:
                    message = box.get_nowait()
                except queue.Empty:
                    await asyncio.sleep(0.002)
                    continue
                await ws.send_text(json.dumps(message))

        sender = asyncio.ensure_future(pump_outbox())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    continue  # garbage upstream never crashes the stream
                kind = msg.get("type")
                if kind == "cursor":
                    try:
                        host.feed_cursor(
                            float(msg["t_ms"]), float(msg["x"]), float(msg["y"])
                        )
                    except (KeyError, TypeError, ValueError):
                        continue
                elif kind == "confirm":
                    host.confirm()
                elif kind == "abort":
                    host.abort_if_active()
        except WebSocketDisconnect:
            host.abort_if_active()  # stream drop mid-trial aborts the trial
        finally:
            sender.cancel()
            host.detach(box)

    return app


def _open_service_device(service: ServiceConfig) -> DeviceSink:
    from tactorbelt.protocol import open_device

    return open_device(service.device_uri)


def run_server(service: ServiceConfig, host: str, port: int) -> None:
    import uvicorn

    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")
