"""Trial sequencing, response capture, acquisition detection, metrics, persistence.

A session presents every target ``repetitions`` times in a seeded
shuffled order, records the cursor trace for each trial, and scores a
selection when the cursor holds inside one target's sector at high
radius.  Training trials additionally reveal the true target to the UI
and are excluded from testing metrics.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Protocol

from tactorbelt.dynamics import Mode, StimulusWaveform
from tactorbelt.geometry import (
    TargetDirection,
    TargetKind,
    TargetSet,
    signed_offset,
    target_pitch_deg,
)
from tactorbelt.perceiver import snap_to_target

__all__ = [
    "Phase",
    "BetweenMode",
    "AcquisitionParams",
    "SessionConfig",
    "PlannedTrial",
    "CursorSample",
    "TrialRecord",
    "MetricsRow",
    "Aggregate",
    "SessionMetrics",
    "StreamLostError",
    "SessionFileError",
    "plan_session",
    "AcquisitionDetector",
    "detect_acquisition",
    "run_trial",
    "training_trial",
    "compute_metrics",
    "persist_session",
    "load_session",
    "metrics_csv",
]

SCHEMA_VERSION = 1


class Phase(Enum):
    TRAINING = "training"
    TESTING = "testing"


class BetweenMode(Enum):
    """Stimulus condition for between-tactor targets within a session."""

    STATIC = "static"
    DYNAMIC = "dynamic"
    INTERLEAVED = "interleaved"  # seeded 50/50 per trial


class StreamLostError(RuntimeError):
    """The response stream died mid-trial."""


class SessionFileError(ValueError):
    """Session file is malformed or has an unsupported schema version."""


@dataclass(frozen=True)
class AcquisitionParams:
    radius_fraction: float = 0.9
    sector_halfwidth_deg: float = 7.5
    hold_ms: float = 200.0

    def __post_init__(self) -> None:
        if not 0.0 < self.radius_fraction <= 1.0:
            raise ValueError("radius_fraction must be in (0, 1]")
        if self.sector_halfwidth_deg <= 0.0 or self.hold_ms < 0.0:
            raise ValueError("sector halfwidth must be positive, hold nonnegative")


@dataclass(frozen=True)
class SessionConfig:
    target_set: TargetSet
    repetitions: int = 5
    between_mode: BetweenMode = BetweenMode.DYNAMIC
    phase: Phase = Phase.TESTING
    randomization_seed: int = 0
    acquisition: AcquisitionParams = AcquisitionParams()
    record_rate_hz: float = 100.0
    inter_trial_gap_ms: float = 500.0
    trial_timeout_ms: float = 10_000.0

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.record_rate_hz <= 0.0:
            raise ValueError("record_rate_hz must be positive")
        pitch = target_pitch_deg(self.target_set)
        if abs(self.acquisition.sector_halfwidth_deg - pitch / 2.0) > 1e-9:
            raise ValueError(
                f"sector halfwidth {self.acquisition.sector_halfwidth_deg} must be "
                f"half the target pitch ({pitch / 2.0})"
            )

    @classmethod
    def for_targets(cls, target_set: TargetSet, **kwargs) -> SessionConfig:
        """Config with the acquisition sector sized to the target pitch."""
        if "acquisition" not in kwargs:
            pitch = target_pitch_deg(target_set)
            kwargs["acquisition"] = AcquisitionParams(
                sector_halfwidth_deg=pitch / 2.0
            )
        return cls(target_set=target_set, **kwargs)


@dataclass(frozen=True)
class PlannedTrial:
    trial_id: int
    target: TargetDirection
    mode: Mode


@dataclass(frozen=True)
class CursorSample:
    """Normalized display coordinates, axes scaled so the rim is radius 1."""

    t_ms: float
    x: float
    y: float

    @property
    def radius(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def angle_deg(self) -> float:
        return math.degrees(math.atan2(self.y, self.x)) % 360.0


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    target: TargetDirection
    mode: Mode
    onset_ts: float
    cursor_trace: tuple[CursorSample, ...]
    selected: TargetDirection | None
    acquisition_ms: float | None
    correct: bool
    phase: Phase = Phase.TESTING

    def __post_init__(self) -> None:
        if (self.selected is None) != (self.acquisition_ms is None):
            raise ValueError("selected and acquisition_ms must be present together")
        expect_correct = (
            self.selected is not None
            and self.selected.angle_deg == self.target.angle_deg
        )
        if self.correct != expect_correct:
            raise ValueError("correct flag inconsistent with selection")
        if self.target.kind is TargetKind.ON_TACTOR and self.mode is not Mode.STATIC:
            raise ValueError("on-tactor trials must be rendered static")


def plan_session(config: SessionConfig) -> list[PlannedTrial]:
    """Seeded shuffled trial list: every target exactly ``repetitions`` times.

    Order is deterministic per seed: targets are expanded in set order,
    shuffled, then modes are drawn (only INTERLEAVED consumes extra
    randomness).  On-tactor trials are always static.
    """
    rng = random.Random(config.randomization_seed)
    targets = [t for t in config.target_set for _ in range(config.repetitions)]
    rng.shuffle(targets)
    trials = []
    for i, target in enumerate(targets):
        if target.kind is TargetKind.ON_TACTOR:
            mode = Mode.STATIC
        elif config.between_mode is BetweenMode.STATIC:
            mode = Mode.STATIC
        elif config.between_mode is BetweenMode.DYNAMIC:
            mode = Mode.DYNAMIC
        else:
            mode = Mode.DYNAMIC if rng.random() < 0.5 else Mode.STATIC
        trials.append(PlannedTrial(trial_id=i, target=target, mode=mode))
    return trials


class AcquisitionDetector:
    """Incremental target-acquisition detector.

    A selection fires at the first sample from which the cursor stays
    at radius >= radius_fraction inside a single target's sector for
    hold_ms continuously; the reported time is the first sample of that
    hold window.  Causal: feeding stops mattering once fired.
    """

    def __init__(self, target_set: TargetSet, params: AcquisitionParams) -> None:
        self._targets = target_set
        self._params = params
        self._run_target: TargetDirection | None = None
        self._run_start_ms: float = 0.0
        self._last_t: float | None = None
        self.result: tuple[TargetDirection, float] | None = None

    def push(self, sample: CursorSample) -> tuple[TargetDirection, float] | None:
        if self.result is not None:
            return self.result
        if self._last_t is not None and sample.t_ms < self._last_t:
            raise ValueError("cursor samples must be monotone in time")
        self._last_t = sample.t_ms

        target = None
        if sample.radius >= self._params.radius_fraction:
            candidate = snap_to_target(sample.angle_deg, self._targets)
            dist = abs(signed_offset(sample.angle_deg, candidate.angle_deg))
            if dist <= self._params.sector_halfwidth_deg:
                target = candidate

        if target is None:
            self._run_target = None
            return None
        if self._run_target is None or target.angle_deg != self._run_target.angle_deg:
            self._run_target = target
            self._run_start_ms = sample.t_ms
        if sample.t_ms - self._run_start_ms >= self._params.hold_ms:
            self.result = (self._run_target, self._run_start_ms)
        return self.result


def detect_acquisition(
    trace: Iterable[CursorSample],
    target_set: TargetSet,
    params: AcquisitionParams = AcquisitionParams(),
) -> tuple[TargetDirection, float] | None:
    """First (selected target, acquisition time) in a trace, or None."""
    detector = AcquisitionDetector(target_set, params)
    for sample in trace:
        hit = detector.push(sample)
        if hit is not None:
            return hit
    return None


class StimulusPlayer(Protocol):
    """Playback surface run_trial drives; implementations may be no-ops."""

    def start(self, waveform: StimulusWaveform) -> None: ...

    def stop(self) -> None: ...


class NullPlayer:
    def start(self, waveform: StimulusWaveform) -> None:
        pass

    def stop(self) -> None:
        pass


def run_trial(
    trial: PlannedTrial,
    waveform: StimulusWaveform,
    samples: Iterable[CursorSample],
    config: SessionConfig,
    player: StimulusPlayer | None = None,
    onset_ts: float = 0.0,
    phase: Phase = Phase.TESTING,
    on_reveal: Callable[[TargetDirection], None] | None = None,
) -> TrialRecord:
    """Run one trial: play the stimulus, consume cursor samples, score.

    Stops at acquisition or when samples pass the trial timeout; an
    exhausted stream without acquisition also scores as a timeout.
    ``on_reveal`` is invoked with the true target for training trials.
    """
    player = player or NullPlayer()
    detector = AcquisitionDetector(config.target_set, config.acquisition)
    trace: list[CursorSample] = []
    selected: TargetDirection | None = None
    acquisition_ms: float | None = None

    if on_reveal is not None:
        on_reveal(trial.target)
    player.start(waveform)
    try:
        for sample in samples:
            if sample.t_ms > config.trial_timeout_ms:
                break
            trace.append(sample)
            hit = detector.push(sample)
            if hit is not None:
                selected, acquisition_ms = hit
                break
    finally:
        player.stop()

    correct = selected is not None and selected.angle_deg == trial.target.angle_deg
    return TrialRecord(
        trial_id=trial.trial_id,
        target=trial.target,
        mode=waveform.mode,
        onset_ts=onset_ts,
        cursor_trace=tuple(trace),
        selected=selected,
        acquisition_ms=acquisition_ms,
        correct=correct,
        phase=phase,
    )


def training_trial(
    trial: PlannedTrial,
    waveform: StimulusWaveform,
    samples: Iterable[CursorSample],
    config: SessionConfig,
    player: StimulusPlayer | None = None,
    onset_ts: float = 0.0,
    on_reveal: Callable[[TargetDirection], None] | None = None,
) -> TrialRecord:
    """Trial with the true target revealed; excluded from testing metrics."""
    return run_trial(
        trial,
        waveform,
        samples,
        config,
        player=player,
        onset_ts=onset_ts,
        phase=Phase.TRAINING,
        on_reveal=on_reveal,
    )


# --- metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class Aggregate:
    attempted: int = 0
    correct: int = 0
    mean_rt_ms: float | None = None

    @property
    def accuracy(self) -> float | None:
        if self.attempted == 0:
            return None
        return self.correct / self.attempted


@dataclass(frozen=True)
class MetricsRow:
    direction_deg: float
    kind: TargetKind
    mode: Mode
    attempted: int
    correct: int
    mean_rt_ms: float | None

    @property
    def accuracy(self) -> float:
        return self.correct / self.attempted


@dataclass(frozen=True)
class SessionMetrics:
    per_direction: tuple[MetricsRow, ...] = ()
    by_kind: dict = field(default_factory=dict)
    by_mode: dict = field(default_factory=dict)
    overall: Aggregate = Aggregate()


def _aggregate(records: list[TrialRecord]) -> Aggregate:
    rts = [r.acquisition_ms for r in records if r.acquisition_ms is not None]
    return Aggregate(
        attempted=len(records),
        correct=sum(1 for r in records if r.correct),
        mean_rt_ms=sum(rts) / len(rts) if rts else None,
    )


def compute_metrics(records: Iterable[TrialRecord]) -> SessionMetrics:
    """Accuracy and mean response time per direction and aggregated.

    Training-phase records are ignored; response times average over
    trials that reached acquisition.  Empty input yields empty metrics.
    """
    testing = [r for r in records if r.phase is Phase.TESTING]
    groups: dict[tuple[float, str], list[TrialRecord]] = {}
    for r in testing:
        groups.setdefault((r.target.angle_deg, r.mode.value), []).append(r)

    rows = []
    for (angle, _mode), recs in sorted(groups.items()):
        agg = _aggregate(recs)
        rows.append(
            MetricsRow(
                direction_deg=angle,
                kind=recs[0].target.kind,
                mode=recs[0].mode,
                attempted=agg.attempted,
                correct=agg.correct,
                mean_rt_ms=agg.mean_rt_ms,
            )
        )
    by_kind = {
        kind.value: _aggregate([r for r in testing if r.target.kind is kind])
        for kind in TargetKind
    }
    by_mode = {
        mode.value: _aggregate([r for r in testing if r.mode is mode])
        for mode in Mode
    }
    return SessionMetrics(
        per_direction=tuple(rows),
        by_kind=by_kind,
        by_mode=by_mode,
        overall=_aggregate(testing),
    )


def metrics_csv(metrics: SessionMetrics) -> str:
    """Per-direction metrics as CSV."""
    lines = ["direction_deg,kind,mode,accuracy,mean_rt_ms"]
    for row in metrics.per_direction:
        rt = "" if row.mean_rt_ms is None else f"{row.mean_rt_ms:.3f}"
        lines.append(
            f"{row.direction_deg:g},{row.kind.value},{row.mode.value},"
            f"{row.accuracy:.6f},{rt}"
        )
    return "\n".join(lines) + "\n"


# --- persistence (JSON Lines) ------------------------------------------------

def _target_to_dict(t: TargetDirection) -> dict:
    return {
        "angle_deg": t.angle_deg,
        "kind": t.kind.value,
        "bracket": list(t.bracket),
        "offset_deg": t.offset_deg,
    }


def _target_from_dict(d: dict) -> TargetDirection:
    return TargetDirection(
        angle_deg=d["angle_deg"],
        kind=TargetKind(d["kind"]),
        bracket=(d["bracket"][0], d["bracket"][1]),
        offset_deg=d["offset_deg"],
    )


def config_to_dict(config: SessionConfig) -> dict:
    return {
        "target_set": [_target_to_dict(t) for t in config.target_set],
        "repetitions": config.repetitions,
        "between_mode": config.between_mode.value,
        "phase": config.phase.value,
        "randomization_seed": config.randomization_seed,
        "acquisition": {
            "radius_fraction": config.acquisition.radius_fraction,
            "sector_halfwidth_deg": config.acquisition.sector_halfwidth_deg,
            "hold_ms": config.acquisition.hold_ms,
        },
        "record_rate_hz": config.record_rate_hz,
        "inter_trial_gap_ms": config.inter_trial_gap_ms,
        "trial_timeout_ms": config.trial_timeout_ms,
    }


def config_from_dict(d: dict) -> SessionConfig:
    return SessionConfig(
        target_set=TargetSet(tuple(_target_from_dict(t) for t in d["target_set"])),
        repetitions=d["repetitions"],
        between_mode=BetweenMode(d["between_mode"]),
        phase=Phase(d["phase"]),
        randomization_seed=d["randomization_seed"],
        acquisition=AcquisitionParams(**d["acquisition"]),
        record_rate_hz=d["record_rate_hz"],
        inter_trial_gap_ms=d["inter_trial_gap_ms"],
        trial_timeout_ms=d["trial_timeout_ms"],
    )


def record_to_dict(r: TrialRecord) -> dict:
    return {
        "trial_id": r.trial_id,
        "target": _target_to_dict(r.target),
        "mode": r.mode.value,
        "onset_ts": r.onset_ts,
        "cursor_trace": [[s.t_ms, s.x, s.y] for s in r.cursor_trace],
        "selected": None if r.selected is None else _target_to_dict(r.selected),
        "acquisition_ms": r.acquisition_ms,
        "correct": r.correct,
        "phase": r.phase.value,
    }


def record_from_dict(d: dict) -> TrialRecord:
    return TrialRecord(
        trial_id=d["trial_id"],
        target=_target_from_dict(d["target"]),
        mode=Mode(d["mode"]),
        onset_ts=d["onset_ts"],
        cursor_trace=tuple(CursorSample(*s) for s in d["cursor_trace"]),
        selected=None if d["selected"] is None else _target_from_dict(d["selected"]),
        acquisition_ms=d["acquisition_ms"],
        correct=d["correct"],
        phase=Phase(d["phase"]),
    )


def _aggregate_to_dict(a: Aggregate) -> dict:
    return {"attempted": a.attempted, "correct": a.correct, "mean_rt_ms": a.mean_rt_ms}


def _aggregate_from_dict(d: dict) -> Aggregate:
    return Aggregate(**d)


def metrics_to_dict(m: SessionMetrics) -> dict:
    return {
        "per_direction": [
            {
                "direction_deg": r.direction_deg,
                "kind": r.kind.value,
                "mode": r.mode.value,
                "attempted": r.attempted,
                "correct": r.correct,
                "mean_rt_ms": r.mean_rt_ms,
            }
            for r in m.per_direction
        ],
        "by_kind": {k: _aggregate_to_dict(v) for k, v in m.by_kind.items()},
        "by_mode": {k: _aggregate_to_dict(v) for k, v in m.by_mode.items()},
        "overall": _aggregate_to_dict(m.overall),
    }


def metrics_from_dict(d: dict) -> SessionMetrics:
    return SessionMetrics(
        per_direction=tuple(
            MetricsRow(
                direction_deg=r["direction_deg"],
                kind=TargetKind(r["kind"]),
                mode=Mode(r["mode"]),
                attempted=r["attempted"],
                correct=r["correct"],
                mean_rt_ms=r["mean_rt_ms"],
            )
            for r in d["per_direction"]
        ),
        by_kind={k: _aggregate_from_dict(v) for k, v in d["by_kind"].items()},
        by_mode={k: _aggregate_from_dict(v) for k, v in d["by_mode"].items()},
        overall=_aggregate_from_dict(d["overall"]),
    )


@dataclass(frozen=True)
class LoadedSession:
    config: SessionConfig
    records: tuple[TrialRecord, ...]
    metrics: SessionMetrics


def persist_session(
    records: Iterable[TrialRecord],
    metrics: SessionMetrics,
    path: str | Path,
    config: SessionConfig,
) -> None:
    """Write a session as JSON Lines: header, one line per trial, metrics."""
    lines = [
        json.dumps(
            {
                "type": "header",
                "schema_version": SCHEMA_VERSION,
                "config": config_to_dict(config),
            }
        )
    ]
    lines += [json.dumps({"type": "trial", **record_to_dict(r)}) for r in records]
    lines.append(json.dumps({"type": "metrics", **metrics_to_dict(metrics)}))
    Path(path).write_text("\n".join(lines) + "\n")


def load_session(path: str | Path) -> LoadedSession:
    """Read a session file back, field for field."""
    records: list[TrialRecord] = []
    config: SessionConfig | None = None
    metrics: SessionMetrics | None = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SessionFileError(f"line {lineno}: malformed JSON ({exc.msg})") from exc
        kind = obj.get("type")
        try:
            if kind == "header":
                version = obj.get("schema_version")
                if version != SCHEMA_VERSION:
                    raise SessionFileError(
                        f"line {lineno}: unsupported schema version {version}"
                    )
                config = config_from_dict(obj["config"])
            elif kind == "trial":
                records.append(record_from_dict(obj))
            elif kind == "metrics":
                metrics = metrics_from_dict(obj)
            else:
                raise SessionFileError(f"line {lineno}: unknown record type {kind!r}")
        except SessionFileError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SessionFileError(f"line {lineno}: bad record ({exc})") from exc
    if config is None:
        raise SessionFileError("missing header record")
    if metrics is None:
        metrics = compute_metrics(records)
    return LoadedSession(config=config, records=tuple(records), metrics=metrics)
