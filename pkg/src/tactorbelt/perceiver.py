"""Simulated perceiver: inverts a stimulus waveform back to an angle.

This is an idealized decoder used as a test oracle and to drive
synthetic sessions, not a model of human perception.  It reads the two
information channels a wearer has: relative amplitudes (static) and
relative dwell durations (dynamic).  Optional angular noise and a
reaction latency make synthetic sessions less degenerate; dynamic
stimuli cost one full perturbation period of extra response time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from tactorbelt.amplitude import (
    AmplitudeDecodeError,
    FalloffParams,
    decode_static,
)
from tactorbelt.dynamics import Mode, StimulusWaveform
from tactorbelt.geometry import (
    TactorLayout,
    TargetDirection,
    TargetSet,
    signed_offset,
    wrap_angle,
)

__all__ = [
    "Decoder",
    "PerceiverModel",
    "UndecodableWaveformError",
    "perceive",
    "snap_to_target",
]


class UndecodableWaveformError(ValueError):
    """Waveform carries no recoverable direction (e.g. all-zero frames)."""


class Decoder(Enum):
    AMPLITUDE_INVERSE = "amplitude_inverse"
    DWELL_RATIO = "dwell_ratio"
    AUTO = "auto"


@dataclass(frozen=True)
class PerceiverModel:
    decoder: Decoder = Decoder.AUTO
    angular_noise_sigma_deg: float = 0.0
    reaction_latency_ms: float = 300.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not self.angular_noise_sigma_deg >= 0.0:
            raise ValueError("angular noise sigma must be >= 0")
        if not self.reaction_latency_ms >= 0.0:
            raise ValueError("reaction latency must be >= 0")

    def make_rng(self) -> random.Random:
        return random.Random(self.rng_seed)


def _decode_amplitude_inverse(
    w: StimulusWaveform, layout: TactorLayout, params: FalloffParams
) -> float:
    try:
        return decode_static(w.frames[0], layout, params)
    except AmplitudeDecodeError as exc:
        raise UndecodableWaveformError(str(exc)) from exc


def _decode_dwell_ratio(w: StimulusWaveform, layout: TactorLayout) -> float:
    """Recover the target from sole-active frame counts over one period.

    offset from the bracket's first tactor = span * c_second / (c_first
    + c_second), the inverse of the dwell split rule.
    """
    if w.period_frames is None:
        raise UndecodableWaveformError(
            "waveform is not periodic; no dwell information to decode"
        )
    if len(w.frames) < w.period_frames:
        raise ValueError("dwell-ratio decoding needs at least one full period")
    counts: dict[int, int] = {}
    for frame in w.frames[: w.period_frames]:
        idx = frame.sole_active()
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        raise UndecodableWaveformError("no sole-active dwell frames in one period")
    if len(counts) == 1:
        (idx,) = counts
        return layout.tactor_angles_deg[idx]
    if len(counts) != 2:
        raise UndecodableWaveformError(f"dwells on {len(counts)} tactors, expected 2")
    i, j = sorted(counts)
    n = layout.tactor_count
    if (j - i) % n != 1:
        if (i - j) % n != 1:
            raise UndecodableWaveformError(f"dwell tactors {i},{j} not adjacent")
        i, j = j, i
    offset = layout.spacing_deg * counts[j] / (counts[i] + counts[j])
    return wrap_angle(layout.tactor_angles_deg[i] + offset)


def perceive(
    w: StimulusWaveform,
    model: PerceiverModel,
    layout: TactorLayout,
    params: FalloffParams,
    rng: random.Random | None = None,
) -> tuple[float, float]:
    """Decode a waveform to (perceived angle, response time).

    Noise is a seeded zero-mean Gaussian perturbation wrapped onto the
    circle; pass one ``rng`` per session run for reproducible streams.
    """
    decoder = model.decoder
    if decoder is Decoder.AUTO:
        decoder = (
            Decoder.DWELL_RATIO if w.mode is Mode.DYNAMIC else Decoder.AMPLITUDE_INVERSE
        )
    if decoder is Decoder.DWELL_RATIO:
        angle = _decode_dwell_ratio(w, layout)
    else:
        angle = _decode_amplitude_inverse(w, layout, params)

    if model.angular_noise_sigma_deg > 0.0:
        if rng is None:
            rng = model.make_rng()
        angle = wrap_angle(angle + rng.gauss(0.0, model.angular_noise_sigma_deg))

    response_ms = model.reaction_latency_ms
    if w.mode is Mode.DYNAMIC:
        response_ms += w.period_ms or 0.0
    return angle, response_ms


def snap_to_target(angle_deg: float, target_set: TargetSet) -> TargetDirection:
    """Nearest target by circular distance; ties go to the lower angle."""
    if not len(target_set):
        raise ValueError("target set is empty")
    return min(
        target_set,
        key=lambda t: (abs(signed_offset(angle_deg, t.angle_deg)), t.angle_deg),
    )
