"""Pure-Python amplitude kernels (fallback when the compiled core is absent).

Must stay numerically identical to ``_native``: both use the platform
libm exp/fmod on the same expression order.
"""

from __future__ import annotations

import math
from typing import Sequence

BACKEND = "pure"


def _abs_offset(x_deg: float, d_deg: float) -> float:
    """|shortest signed offset| between two angles, in [0, 180]."""
    delta = math.fmod(x_deg - d_deg, 360.0)
    if delta < 0.0:
        delta = -delta
    if delta > 180.0:
        delta = 360.0 - delta
    return delta


def falloff_value(x_deg: float, d_deg: float, span_deg: float, decay_deg: float) -> float:
    """Exponential amplitude falloff of a tactor at ``d`` for a source at ``x``.

    Zero at and beyond ``span_deg`` of separation.
    """
    delta = _abs_offset(x_deg, d_deg)
    if delta >= span_deg:
        return 0.0
    y = 1.0 - math.exp(-(span_deg - delta) / decay_deg)
    return y if y > 0.0 else 0.0


def amplitude_frame(
    source_deg: float,
    tactor_angles: Sequence[float],
    span_deg: float,
    decay_deg: float,
) -> tuple[float, ...]:
    """Per-tactor amplitudes for one virtual source angle."""
    return tuple(
        falloff_value(source_deg, d, span_deg, decay_deg) for d in tactor_angles
    )


def render_frames(
    source_degs: Sequence[float],
    tactor_angles: Sequence[float],
    span_deg: float,
    decay_deg: float,
) -> list[tuple[float, ...]]:
    """Amplitude frames for a whole series of source angles (the hot loop)."""
    return [
        amplitude_frame(s, tactor_angles, span_deg, decay_deg) for s in source_degs
    ]
