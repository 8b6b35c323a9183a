"""Dynamic stimulus: trapezoidal oscillation of the virtual vibration source.

For a between-tactor target the virtual source cycles between the two
bracketing tactors: it dwells on the nearer tactor, ramps linearly in
angle to the farther one over a fixed transition time, dwells there,
and ramps back, repeating with a 1 s period.  Dwell durations split the
non-transition time in inverse proportion to each tactor's distance
from the target, so the source spends longest where the target is
closest (600/200 ms at the quarter point, 400/400 at the midpoint).

On-tactor targets are always rendered static.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from tactorbelt import _kernels
from tactorbelt.amplitude import AmplitudeVector, FalloffParams, encode_static
from tactorbelt.geometry import TactorLayout, TargetDirection, TargetKind, signed_offset

__all__ = [
    "Mode",
    "DwellSchedule",
    "StimulusWaveform",
    "dwell_times",
    "virtual_source_angle",
    "render_waveform",
]

DEFAULT_PERIOD_MS = 1000.0
DEFAULT_TRANSITION_MS = 100.0
DEFAULT_FRAME_RATE_HZ = 100.0

_INT_EPS = 1e-9


class Mode(Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class DwellSchedule:
    """Trapezoid timing for one between-tactor target.

    ``dwell_first_ms`` belongs to the bracket's first tactor (the one
    the target offset is measured from), regardless of which tactor the
    cycle starts on.
    """

    period_ms: float
    transition_ms: float
    dwell_first_ms: float
    dwell_second_ms: float

    def __post_init__(self) -> None:
        total = self.dwell_first_ms + self.dwell_second_ms + 2.0 * self.transition_ms
        if abs(total - self.period_ms) > 1e-6:
            raise ValueError("dwells plus two transitions must fill the period")
        if min(self.dwell_first_ms, self.dwell_second_ms, self.transition_ms) <= 0.0:
            raise ValueError("all schedule durations must be positive")


def dwell_times(
    target: TargetDirection,
    period_ms: float = DEFAULT_PERIOD_MS,
    transition_ms: float = DEFAULT_TRANSITION_MS,
    span_deg: float | None = None,
) -> DwellSchedule:
    """Dwell split for a between-tactor target.

    Each tactor's dwell is proportional to the *other* tactor's angular
    distance from the target: dwell_i = total * (span - offset_i) / span,
    which is the inverse-distance ratio with a fixed total dwell budget.
    """
    if target.kind is not TargetKind.BETWEEN:
        raise ValueError("on-tactor targets are always static; no dwell schedule")
    if period_ms <= 2.0 * transition_ms:
        raise ValueError("period must exceed two transitions")
    span = 60.0 if span_deg is None else span_deg
    total_dwell = period_ms - 2.0 * transition_ms
    offset_first = target.offset_deg
    offset_second = span - target.offset_deg
    return DwellSchedule(
        period_ms=period_ms,
        transition_ms=transition_ms,
        dwell_first_ms=total_dwell * (span - offset_first) / span,
        dwell_second_ms=total_dwell * (span - offset_second) / span,
    )


def _near_is_first(target: TargetDirection, span_deg: float) -> bool:
    # midpoint tie resolves to the bracket's first (lower-angle) tactor
    return target.offset_deg <= span_deg / 2.0


def virtual_source_angle(
    t_ms: float,
    target: TargetDirection,
    schedule: DwellSchedule,
    layout: TactorLayout,
) -> float:
    """Source angle at time ``t_ms``, periodically extended.

    The cycle starts dwelling on the nearest tactor and ramps toward
    the far one first.
    """
    angles = layout.tactor_angles_deg
    first, second = target.bracket
    if _near_is_first(target, layout.spacing_deg):
        near, far = angles[first], angles[second]
        dwell_near = schedule.dwell_first_ms
        dwell_far = schedule.dwell_second_ms
    else:
        near, far = angles[second], angles[first]
        dwell_near = schedule.dwell_second_ms
        dwell_far = schedule.dwell_first_ms

    step = signed_offset(far, near)  # short arc between adjacent tactors
    trans = schedule.transition_ms
    t = math.fmod(t_ms, schedule.period_ms)
    if t < 0.0:
        t += schedule.period_ms

    if t < dwell_near:
        return near
    t -= dwell_near
    if t < trans:
        return (near + step * (t / trans)) % 360.0
    t -= trans
    if t < dwell_far:
        return far % 360.0
    t -= dwell_far
    return (far - step * (t / trans)) % 360.0


@dataclass(frozen=True)
class StimulusWaveform:
    """Time series of amplitude frames at a fixed frame rate."""

    mode: Mode
    frame_rate_hz: float
    frames: tuple[AmplitudeVector, ...]
    period_frames: int | None = None

    def __post_init__(self) -> None:
        if not self.frames:
            raise ValueError("waveform must contain at least one frame")
        if self.mode is Mode.DYNAMIC and not self.period_frames:
            raise ValueError("dynamic waveforms must carry period_frames")

    @property
    def frame_interval_ms(self) -> float:
        return 1000.0 / self.frame_rate_hz

    @property
    def duration_ms(self) -> float:
        return len(self.frames) * self.frame_interval_ms

    @property
    def period_ms(self) -> float | None:
        if self.period_frames is None:
            return None
        return self.period_frames * self.frame_interval_ms


def _exact_frame_count(duration_ms: float, frame_rate_hz: float, what: str) -> int:
    frames = duration_ms * frame_rate_hz / 1000.0
    if abs(frames - round(frames)) > _INT_EPS:
        raise ValueError(
            f"{what} of {duration_ms} ms is not a whole number of frames "
            f"at {frame_rate_hz} Hz"
        )
    return int(round(frames))


def render_waveform(
    target: TargetDirection,
    mode: Mode,
    layout: TactorLayout,
    params: FalloffParams,
    frame_rate_hz: float = DEFAULT_FRAME_RATE_HZ,
    duration_ms: float | None = None,
    period_ms: float = DEFAULT_PERIOD_MS,
    transition_ms: float = DEFAULT_TRANSITION_MS,
) -> StimulusWaveform:
    """Render a target into amplitude frames.

    Static mode repeats the static encoding.  Dynamic mode evaluates
    the falloff at the virtual source position sampled at each frame's
    midpoint, so a frame carries the amplitudes of the interval it
    spans and dwell frame counts match the schedule exactly.  Requests
    for dynamic on-tactor targets come back as static waveforms.
    """
    if duration_ms is None:
        duration_ms = period_ms
    n_frames = _exact_frame_count(duration_ms, frame_rate_hz, "duration")
    if n_frames < 1:
        raise ValueError("duration must cover at least one frame")

    if mode is Mode.STATIC or target.kind is TargetKind.ON_TACTOR:
        frame = encode_static(target, layout, params)
        return StimulusWaveform(
            mode=Mode.STATIC,
            frame_rate_hz=frame_rate_hz,
            frames=(frame,) * n_frames,
        )

    period_frames = _exact_frame_count(period_ms, frame_rate_hz, "period")
    _exact_frame_count(transition_ms, frame_rate_hz, "transition")
    schedule = dwell_times(target, period_ms, transition_ms, span_deg=layout.spacing_deg)
    dt = 1000.0 / frame_rate_hz
    sources = [
        virtual_source_angle((k + 0.5) * dt, target, schedule, layout)
        for k in range(n_frames)
    ]
    raw = _kernels.render_frames(
        sources, layout.tactor_angles_deg, params.span_deg, params.decay_deg
    )
    return StimulusWaveform(
        mode=Mode.DYNAMIC,
        frame_rate_hz=frame_rate_hz,
        frames=tuple(AmplitudeVector(f) for f in raw),
        period_frames=period_frames,
    )
