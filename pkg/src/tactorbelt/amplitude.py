"""Static amplitude encoding: target angle -> per-tactor vibration amplitudes.

A tactor at angle ``d`` driven for a virtual source at angle ``x`` gets

    y = max(1 - exp(-(span - |delta|) / decay), 0),   delta = signed_offset(x, d)

with ``span`` equal to the tactor spacing (60 deg on the default belt)
and ``decay = 15`` deg.  This is the wrap-safe form of the usual
two-branch piecewise definition; the branches agree with it wherever
they are defined, and the wrap form extends them across the 330/30 seam
where a raw ``x <= d`` comparison is meaningless on a circle.

Amplitudes are unitless command fractions in [0, 1]; mapping to drive
voltage happens in the protocol module.  The encoder's maximum is
1 - e^-4 (about 0.9817), deliberately not renormalized to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from tactorbelt import _kernels
from tactorbelt.geometry import (
    TactorLayout,
    TargetDirection,
    signed_offset,
    wrap_angle,
)

__all__ = [
    "FalloffParams",
    "AmplitudeVector",
    "AmplitudeDecodeError",
    "falloff",
    "amplitudes_at",
    "encode_static",
    "decode_static",
]


class AmplitudeDecodeError(ValueError):
    """Amplitude vector cannot be inverted back to a source angle."""


@dataclass(frozen=True)
class FalloffParams:
    """Falloff constants: e-folding width and the zero-crossing span."""

    decay_deg: float = 15.0
    span_deg: float = 60.0

    def __post_init__(self) -> None:
        if self.decay_deg <= 0.0:
            raise ValueError("decay_deg must be positive")
        if self.span_deg <= 0.0:
            raise ValueError("span_deg must be positive")

    @classmethod
    def for_layout(cls, layout: TactorLayout, decay_deg: float = 15.0) -> FalloffParams:
        """Params whose span matches the layout's tactor spacing."""
        return cls(decay_deg=decay_deg, span_deg=layout.spacing_deg)

    @property
    def peak(self) -> float:
        """Amplitude commanded directly on a tactor (1 - e^(-span/decay))."""
        return 1.0 - math.exp(-self.span_deg / self.decay_deg)


@dataclass(frozen=True)
class AmplitudeVector:
    """Per-tactor amplitudes at one instant, each in [0, 1]."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("amplitude vector must not be empty")
        for v in self.values:
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"amplitude {v} outside [0, 1]")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def active_indices(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.values) if v > 0.0)

    def sole_active(self) -> int | None:
        """Index of the single nonzero entry, or None."""
        active = self.active_indices()
        return active[0] if len(active) == 1 else None

    def check_support(self) -> None:
        """Raise unless nonzero entries are at most two adjacent tactors."""
        active = self.active_indices()
        if len(active) > 2:
            raise ValueError(f"more than two active tactors: {active}")
        if len(active) == 2:
            i, j = active
            n = len(self.values)
            if (j - i) % n != 1 and (i - j) % n != 1:
                raise ValueError(f"active tactors {i},{j} are not adjacent")


def falloff(x_deg: float, d_deg: float, params: FalloffParams = FalloffParams()) -> float:
    """Amplitude of a tactor at ``d_deg`` for a virtual source at ``x_deg``."""
    return _kernels.falloff_value(x_deg, d_deg, params.span_deg, params.decay_deg)


def amplitudes_at(
    source_deg: float, layout: TactorLayout, params: FalloffParams
) -> AmplitudeVector:
    """Amplitude vector for an arbitrary source angle.

    With span equal to the tactor spacing, only the bracketing pair can
    be nonzero, so the result always has one- or two-adjacent support.
    """
    return AmplitudeVector(
        _kernels.amplitude_frame(
            source_deg, layout.tactor_angles_deg, params.span_deg, params.decay_deg
        )
    )


def encode_static(
    target: TargetDirection, layout: TactorLayout, params: FalloffParams
) -> AmplitudeVector:
    """Static encoding of a target direction."""
    return amplitudes_at(target.angle_deg, layout, params)


def _offset_from_amplitude(y: float, params: FalloffParams) -> float:
    """Invert the falloff: angular distance that produces amplitude ``y``."""
    if y >= 1.0:
        raise AmplitudeDecodeError(f"amplitude {y} is outside the encoder range")
    return params.span_deg + params.decay_deg * math.log(1.0 - y)


def decode_static(
    v: AmplitudeVector, layout: TactorLayout, params: FalloffParams
) -> float:
    """Analytic inverse of :func:`encode_static`.

    Accepts vectors with one or two adjacent nonzero entries (what the
    encoder can produce).  Two-tactor vectors are inverted from both
    sides and averaged; the estimates coincide for exact encodings.
    """
    active = v.active_indices()
    if not active:
        raise AmplitudeDecodeError("all-zero amplitude vector")
    try:
        v.check_support()
    except ValueError as exc:
        raise AmplitudeDecodeError(str(exc)) from exc

    angles = layout.tactor_angles_deg
    if len(active) == 1:
        i = active[0]
        return wrap_angle(angles[i] + _offset_from_amplitude(v[i], params))

    i, j = active
    n = layout.tactor_count
    if (j - i) % n != 1:
        i, j = j, i  # order so that j follows i around the belt
    off_i = _offset_from_amplitude(v[i], params)
    off_j = _offset_from_amplitude(v[j], params)
    est_from_i = angles[i] + off_i
    est_from_j = angles[i] + signed_offset(angles[j], angles[i]) - off_j
    return wrap_angle((est_from_i + est_from_j) / 2.0)
