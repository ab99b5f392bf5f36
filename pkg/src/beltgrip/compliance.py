"""Passive finger compliance as a height/angle dependent linear spring.

The finger is characterised by compression tests at a handful of probe
heights and propulsion angles.  Between probes the stiffness is bilinearly
interpolated; outside them nothing is assumed and lookups are refused.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

from beltgrip.core import ValidationError

# measured column at theta = 0 deg; h2 has no reported value and takes the h1/h3 midpoint
MEASURED_K_THETA0 = (1.699, (1.699 + 0.838) / 2.0, 0.838, 1.051)
DEFAULT_HEIGHTS = (0.025, 0.050, 0.075, 0.100)
DEFAULT_ANGLES = (0.0, 45.0, 90.0)
MAX_DEPTH_MM = 15.0
PROBE_SPEED_MM_S = 5.0
# fin-ray fingers drop to about this fraction of base stiffness at the tip; reference only
FIN_RAY_TIP_RATIO = 0.25


class OutOfRegionError(ValueError):
    """Lookup outside the characterised part of the finger."""


@dataclass(frozen=True)
class StiffnessProfile:
    """Stiffness knots in N/mm, indexed ``k[angle][height]``.

    Angles are propulsion angles in degrees, heights are in metres along the
    finger.  Both axes must be strictly ascending.
    """

    angles: tuple[float, ...]
    heights: tuple[float, ...]
    k: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        angles = tuple(float(a) for a in self.angles)
        heights = tuple(float(h) for h in self.heights)
        k = tuple(tuple(float(v) for v in row) for row in self.k)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "k", k)

        if not angles or not heights:
            raise ValidationError("stiffness profile needs at least one angle and one height")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise ValidationError("angles must be strictly ascending")
        if any(b <= a for a, b in zip(heights, heights[1:])):
            raise ValidationError("heights must be strictly ascending")
        if heights[0] <= 0:
            raise ValidationError("heights must lie within (0, finger_height)")
        if len(k) != len(angles) or any(len(row) != len(heights) for row in k):
            raise ValidationError(
                f"k must be {len(angles)} x {len(heights)} (angles x heights)"
            )
        if any(not v > 0 for row in k for v in row):
            raise ValidationError("all k > 0 violated")


def default_profile(
    heights: Sequence[float] = DEFAULT_HEIGHTS,
    angle_scales: Sequence[float] = (1.0, 1.0, 1.0),
) -> StiffnessProfile:
    """Measured theta=0 column, with the 45 and 90 degree columns scaled from it."""
    if len(angle_scales) != len(DEFAULT_ANGLES):
        raise ValidationError("one scale per default angle (0, 45, 90) required")
    rows = tuple(tuple(s * v for v in MEASURED_K_THETA0) for s in angle_scales)
    return StiffnessProfile(angles=DEFAULT_ANGLES, heights=tuple(heights), k=rows)


def uniform_profile(k: float, heights: Sequence[float] = DEFAULT_HEIGHTS) -> StiffnessProfile:
    """Constant stiffness everywhere; handy for isolating geometry effects."""
    return StiffnessProfile(
        angles=DEFAULT_ANGLES,
        heights=tuple(heights),
        k=tuple(tuple(k for _ in heights) for _ in DEFAULT_ANGLES),
    )


def _cell(axis: tuple[float, ...], value: float, what: str) -> tuple[int, float]:
    if not axis[0] <= value <= axis[-1]:
        raise OutOfRegionError(
            f"outside characterized region: {what}={value!r} not in [{axis[0]}, {axis[-1]}]"
        )
    if len(axis) == 1:
        return 0, 0.0
    i = min(bisect.bisect_right(axis, value) - 1, len(axis) - 2)
    t = (value - axis[i]) / (axis[i + 1] - axis[i])
    return i, t


def _lerp(a: float, b: float, t: float) -> float:
    # this form is exact at both t=0 and t=1
    return (1.0 - t) * a + t * b


def stiffness_at(profile: StiffnessProfile, h: float, theta: float = 0.0) -> float:
    """Stiffness in N/mm at height ``h`` (m) and propulsion angle ``theta`` (deg)."""
    j, u = _cell(profile.heights, h, "h")
    i, t = _cell(profile.angles, theta, "theta")
    k = profile.k
    nj = min(j + 1, len(profile.heights) - 1)
    lo = _lerp(k[i][j], k[i][nj], u)
    if t == 0.0:
        return lo
    hi = _lerp(k[i + 1][j], k[i + 1][nj], u)
    return _lerp(lo, hi, t)


def normal_force(
    profile: StiffnessProfile, penetration: float, h: float, theta: float = 0.0
) -> float:
    """Spring force in N for ``penetration`` in mm."""
    if penetration < 0:
        raise ValidationError("penetration >= 0 violated")
    if penetration > MAX_DEPTH_MM:
        raise OutOfRegionError(
            f"beyond characterized compression depth: {penetration} mm > {MAX_DEPTH_MM} mm"
        )
    if penetration == 0:
        return 0.0
    return stiffness_at(profile, h, theta) * penetration
