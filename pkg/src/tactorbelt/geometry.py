"""Belt geometry: tactor layout and the directional target set.

Angles are degrees in [0, 360), measured from the front center of the
torso (navel = 0), increasing counterclockwise viewed from above.  The
belt is a circle in angle space; any on-screen ellipse is a display-only
projection handled by the frontend.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

__all__ = [
    "TactorLayout",
    "TargetKind",
    "TargetDirection",
    "TargetSet",
    "build_layout",
    "build_target_set",
    "classify_direction",
    "signed_offset",
    "wrap_angle",
    "save_layout_config",
    "load_layout_config",
]

ANGLE_EPS = 1e-9


def wrap_angle(angle_deg: float) -> float:
    """Normalize an angle to [0, 360)."""
    a = math.fmod(angle_deg, 360.0)
    if a < 0.0:
        a += 360.0
    return 0.0 if a == 360.0 else a


def signed_offset(x_deg: float, d_deg: float) -> float:
    """Shortest signed angular offset ``x - d`` wrapped into (-180, 180].

    Antisymmetric except at exactly 180, which maps to +180 from either
    direction.
    """
    delta = math.fmod(x_deg - d_deg, 360.0)
    if delta <= -180.0:
        delta += 360.0
    elif delta > 180.0:
        delta -= 360.0
    return delta


@dataclass(frozen=True)
class TactorLayout:
    """Evenly spaced tactors on a circular belt.

    ``spacing_cm`` is informational metadata (physical strap spacing);
    all stimulus math uses angles only.
    """

    tactor_count: int = 6
    spacing_deg: float = 60.0
    spacing_cm: float = 12.0
    tactor_angles_deg: tuple[float, ...] = (30.0, 90.0, 150.0, 210.0, 270.0, 330.0)

    def __post_init__(self) -> None:
        n = self.tactor_count
        if n < 2:
            raise ValueError(f"need at least 2 tactors, got {n}")
        if len(self.tactor_angles_deg) != n:
            raise ValueError("tactor_angles_deg length does not match tactor_count")
        if abs(n * self.spacing_deg - 360.0) > ANGLE_EPS:
            raise ValueError("tactor_count * spacing_deg must equal 360")
        angles = self.tactor_angles_deg
        for i, a in enumerate(angles):
            if not 0.0 <= a < 360.0:
                raise ValueError(f"tactor angle {a} outside [0, 360)")
            if i > 0 and a <= angles[i - 1]:
                raise ValueError("tactor angles must be strictly increasing")
            gap = angles[(i + 1) % n] - a
            if gap <= 0:
                gap += 360.0
            if abs(gap - self.spacing_deg) > ANGLE_EPS:
                raise ValueError("tactor angles must be evenly spaced")

    @property
    def is_front_symmetric(self) -> bool:
        """True when no tactor sits at 0 and the nearest two straddle it evenly."""
        nearest = min(abs(signed_offset(a, 0.0)) for a in self.tactor_angles_deg)
        return abs(nearest - self.spacing_deg / 2.0) <= ANGLE_EPS

    def adjacent_pair(self, first_index: int) -> tuple[int, int]:
        """Bracket pair starting at ``first_index``, wrapping at the seam."""
        return first_index, (first_index + 1) % self.tactor_count


class TargetKind(Enum):
    ON_TACTOR = "on_tactor"
    BETWEEN = "between"


@dataclass(frozen=True)
class TargetDirection:
    """One displayable direction, classified against a layout.

    ``bracket`` holds the indices of the two adjacent tactors spanning
    the target, the tactor the offset is measured from first, so that
    ``angle_deg = angles[bracket[0]] + offset_deg (mod 360)``.  On the
    wrap pair the first tactor is the numerically larger angle.
    """

    angle_deg: float
    kind: TargetKind
    bracket: tuple[int, int]
    offset_deg: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.angle_deg < 360.0:
            raise ValueError(f"target angle {self.angle_deg} outside [0, 360)")
        if self.offset_deg < 0.0:
            raise ValueError("offset_deg must be nonnegative")
        on = self.kind is TargetKind.ON_TACTOR
        if on != (self.offset_deg == 0.0):
            raise ValueError("on-tactor targets must have offset 0 and vice versa")


@dataclass(frozen=True)
class TargetSet:
    """Ordered collection of target directions, ascending in angle."""

    targets: tuple[TargetDirection, ...]

    def __post_init__(self) -> None:
        angles = [t.angle_deg for t in self.targets]
        if len(set(angles)) != len(angles):
            raise ValueError("target angles must be distinct")

    def __len__(self) -> int:
        return len(self.targets)

    def __iter__(self):
        return iter(self.targets)

    def __getitem__(self, i: int) -> TargetDirection:
        return self.targets[i]

    def by_angle(self, angle_deg: float) -> TargetDirection:
        angle_deg = wrap_angle(angle_deg)
        for t in self.targets:
            if abs(signed_offset(t.angle_deg, angle_deg)) <= ANGLE_EPS:
                return t
        raise KeyError(f"no target at {angle_deg} deg")


def build_layout(
    tactor_count: int = 6,
    front_offset: bool = True,
    spacing_cm: float = 12.0,
) -> TactorLayout:
    """Construct an evenly spaced layout.

    With ``front_offset`` (the default) the ring is rotated by half the
    spacing so the two front tactors straddle 0 deg symmetrically; the
    default 6-tactor belt lands on {30, 90, 150, 210, 270, 330}.
    """
    if tactor_count < 2:
        raise ValueError(f"need at least 2 tactors, got {tactor_count}")
    if 360 % tactor_count != 0:
        raise ValueError(f"{tactor_count} tactors do not divide 360 degrees evenly")
    spacing = 360.0 / tactor_count
    start = spacing / 2.0 if front_offset else 0.0
    angles = tuple(start + i * spacing for i in range(tactor_count))
    return TactorLayout(
        tactor_count=tactor_count,
        spacing_deg=spacing,
        spacing_cm=spacing_cm,
        tactor_angles_deg=angles,
    )


def classify_direction(angle_deg: float, layout: TactorLayout) -> TargetDirection:
    """Classify an arbitrary angle as on-tactor or between, with bracket/offset."""
    angle_deg = wrap_angle(angle_deg)
    angles = layout.tactor_angles_deg
    for i, a in enumerate(angles):
        off = wrap_angle(angle_deg - a)
        if off < layout.spacing_deg - ANGLE_EPS or off >= 360.0 - ANGLE_EPS:
            if off >= 360.0 - ANGLE_EPS or off <= ANGLE_EPS:
                return TargetDirection(a, TargetKind.ON_TACTOR, layout.adjacent_pair(i), 0.0)
            return TargetDirection(angle_deg, TargetKind.BETWEEN, layout.adjacent_pair(i), off)
    raise ValueError(f"angle {angle_deg} not bracketed by any tactor pair")


def build_target_set(layout: TactorLayout, per_gap: int = 3) -> TargetSet:
    """Targets at uniform pitch: one per tactor plus ``per_gap`` per gap.

    The default layout with ``per_gap=3`` yields 24 directions, every
    15 degrees around the belt.
    """
    if per_gap < 0:
        raise ValueError("per_gap must be nonnegative")
    pitch = layout.spacing_deg / (per_gap + 1)
    targets = []
    for i, a in enumerate(layout.tactor_angles_deg):
        for j in range(per_gap + 1):
            targets.append(classify_direction(a + j * pitch, layout))
    targets.sort(key=lambda t: t.angle_deg)
    return TargetSet(targets=tuple(targets))


def target_pitch_deg(target_set: TargetSet) -> float:
    """Uniform angular pitch of a target set."""
    angles = sorted(t.angle_deg for t in target_set)
    return 360.0 / len(angles)


# --- config file round trip (consumed by the service and CLI) ---------------

def layout_to_dict(layout: TactorLayout) -> dict:
    return {
        "tactor_count": layout.tactor_count,
        "spacing_deg": layout.spacing_deg,
        "spacing_cm": layout.spacing_cm,
        "tactor_angles_deg": list(layout.tactor_angles_deg),
    }


def layout_from_dict(data: dict) -> TactorLayout:
    return TactorLayout(
        tactor_count=int(data["tactor_count"]),
        spacing_deg=float(data["spacing_deg"]),
        spacing_cm=float(data.get("spacing_cm", 12.0)),
        tactor_angles_deg=tuple(float(a) for a in data["tactor_angles_deg"]),
    )


def save_layout_config(layout: TactorLayout, path: str | Path, per_gap: int = 3) -> None:
    """Write layout plus target-set granularity as a readable JSON config."""
    doc = {"layout": layout_to_dict(layout), "per_gap": per_gap}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_layout_config(path: str | Path) -> tuple[TactorLayout, TargetSet]:
    doc = json.loads(Path(path).read_text())
    layout = layout_from_dict(doc["layout"])
    return layout, build_target_set(layout, per_gap=int(doc.get("per_gap", 3)))
