"""Manipulation planning and closed-form estimates.

Planners are open loop: they assume the belts drive the object without slip
and leave it to simulation to show how far reality falls short.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from beltgrip.compliance import OutOfRegionError, stiffness_at
from beltgrip.contact import GRASP_ANGLE, ContactParams, penetration
from beltgrip.core import G, BeltSchedule, GripperConfig, ObjectSpec, Segment, ValidationError
from beltgrip.dynamics import Trajectory

__all__ = [
    "BeltSchedule",
    "Segment",
    "ETA",
    "InfeasibleGrip",
    "Phases",
    "detect_phases",
    "gap_for_normal_force",
    "max_payload",
    "plan_reorient",
    "plan_reposition",
    "reorientation_angle",
    "required_normal_force",
]

# degree-to-radian factor carried by the printed displacement/angle relation
ETA = math.pi / 180.0


class InfeasibleGrip(ValueError):
    def __init__(self, required: float, available: float):
        self.required = required
        self.available = available
        super().__init__(
            f"infeasible grip: required friction {required:.6g} N exceeds available {available:.6g} N"
        )


def max_payload(mu_bo: float, tau_m: float, L_c: float, g: float = G) -> float:
    """Heaviest object (kg) the belt motors can hold: ``2 mu tau / L_c`` converted from weight to mass.

    ``tau_m`` in N·m, ``L_c`` in m.
    """
    if not mu_bo >= 0:
        raise ValidationError("mu_bo >= 0 violated")
    if not tau_m > 0:
        raise ValidationError("tau_m > 0 violated")
    if not L_c > 0:
        raise ValidationError("L_c > 0 violated")
    return 2.0 * mu_bo * tau_m / (L_c * g)


def required_normal_force(mass: float, mu: float, g: float = G) -> float:
    """Per-side normal force at which two friction contacts just carry the weight."""
    return mass * g / (2.0 * mu)


def gap_for_normal_force(spec: ObjectSpec, gripper: GripperConfig, F_N: float, h: float) -> float:
    """Belt gap that squeezes ``spec`` with ``F_N`` per side when held at height ``h``."""
    if spec.radius is None:
        raise ValidationError("contact requires cross-section radius")
    depth_mm = F_N / stiffness_at(gripper.stiffness_profile, h, GRASP_ANGLE)
    return 2.0 * spec.radius - 2.0 * depth_mm / 1000.0


def reorientation_angle(
    S_L: float,
    S_R: float,
    r: float,
    mode: str = "rolling",
    same_direction: Optional[bool] = None,
) -> float:
    """Object rotation implied by belt travel.

    ``rolling`` assumes no slip at either contact, so the object turns by the
    travel difference over its diameter.  ``paper-literal`` evaluates the
    radius-over-displacement relation as printed, picking the difference
    branch when the belts ran the same way (``same_direction``, inferred from
    the signs of ``S_L`` and ``S_R`` if not given) and the sum otherwise.
    That form is dimensionally inconsistent and is kept for comparison only.
    """
    if not r > 0:
        raise ValidationError("r > 0 violated")
    if mode == "rolling":
        return (S_R - S_L) / (2.0 * r)
    if mode != "paper-literal":
        raise ValueError(f"unknown mode {mode!r}")
    if same_direction is None:
        same_direction = S_L * S_R > 0
    if same_direction:
        denom = S_L - S_R
        if denom == 0:
            raise ValidationError("undefined: zero displacement difference")
    else:
        denom = S_L + S_R
        if denom == 0:
            raise ValidationError("undefined: zero displacement sum")
    return r / denom * ETA


def _mu(spec: ObjectSpec, gripper: GripperConfig, params: Optional[ContactParams]) -> float:
    if spec.friction_override is not None:
        return spec.friction_override
    return params.mu_bo if params is not None else gripper.mu_bo


def _check_speed(speed: float, limit: Optional[float]) -> float:
    s = abs(speed)
    if not s > 0:
        raise ValidationError("speed must be non-zero")
    if limit is not None and s > limit:
        raise ValidationError(f"|speed| <= belt_speed_limit violated: {s} > {limit}")
    return s


def plan_reposition(
    target_dx: float,
    speed: float,
    gripper: GripperConfig,
    spec: ObjectSpec,
    x0: float,
    params: Optional[ContactParams] = None,
) -> BeltSchedule:
    """Move the object by ``target_dx`` along the finger with both belts in step.

    Raises :class:`InfeasibleGrip` when the weakest grip along the path
    cannot carry the object's weight.
    """
    if target_dx == 0:
        return BeltSchedule()
    s = _check_speed(speed, gripper.belt_speed_limit)
    lo, hi = gripper.region
    x1 = x0 + target_dx
    for name, h in (("start", x0), ("end", x1)):
        if not lo <= h <= hi:
            raise OutOfRegionError(
                f"outside characterized region: {name} height {h!r} not in [{lo}, {hi}]"
            )

    # stiffness is piecewise linear, so its minimum over the path sits at an end or a knot
    a, b = sorted((x0, x1))
    probes = [a, b] + [h for h in gripper.stiffness_profile.heights if a < h < b]
    depth = penetration(spec, gripper)
    k_min = min(stiffness_at(gripper.stiffness_profile, h, GRASP_ANGLE) for h in probes)
    available = 2.0 * _mu(spec, gripper, params) * k_min * depth
    required = spec.mass * G
    if available < required:
        raise InfeasibleGrip(required, available)

    v = math.copysign(s, target_dx)
    return BeltSchedule((Segment(abs(target_dx) / s, v, v),))


def plan_reorient(
    target_alpha: float,
    speed: float,
    spec: ObjectSpec,
    speed_limit: Optional[float] = None,
) -> BeltSchedule:
    """Spin the object by ``target_alpha`` (rad) with the belts running in opposition.

    Positive angles drive the right belt up and the left belt down.
    """
    if spec.radius is None:
        raise ValidationError("reorientation requires cross-section radius")
    if target_alpha == 0:
        return BeltSchedule()
    s = _check_speed(speed, speed_limit)
    v = math.copysign(s, target_alpha)
    return BeltSchedule((Segment(abs(target_alpha) * spec.radius / s, -v, v),))


@dataclass(frozen=True)
class Phases:
    """Manipulation milestones; ``None`` means the phase was not reached."""

    contact_lift: Optional[float]
    orient_start: Optional[float]
    descent_start: Optional[float]
    stable_placement: Optional[float]

    def as_tuple(self) -> tuple[Optional[float], ...]:
        return (self.contact_lift, self.orient_start, self.descent_start, self.stable_placement)

    @property
    def all_reached(self) -> bool:
        return all(t is not None for t in self.as_tuple())

    @property
    def strictly_ordered(self) -> bool:
        ts = self.as_tuple()
        return self.all_reached and all(a < b for a, b in zip(ts, ts[1:]))


def _first(mask: np.ndarray, after: int = 0) -> Optional[int]:
    hits = np.flatnonzero(mask[after:])
    return int(hits[0]) + after if hits.size else None


def detect_phases(
    traj: Trajectory,
    v_min: float = 1e-3,
    omega_min: float = 0.01,
    dwell: float = 0.2,
) -> Phases:
    """Find lift-off, rotation start, descent start and settled placement.

    Placement is reported at the moment the object has stayed still for a
    full ``dwell``, searching after the descent when there was one.
    """
    if len(traj) == 0:
        raise ValidationError("trajectory must be non-empty")
    t, v, w = traj["t"], traj["v"], traj["omega"]

    i_lift = _first(traj.in_contact & (v > v_min))
    i_orient = _first(np.abs(w) > omega_min)
    i_desc = _first(v < -v_min, i_lift + 1) if i_lift is not None else None

    still = (np.abs(v) < v_min) & (np.abs(w) < omega_min)
    start = i_desc + 1 if i_desc is not None else 0
    placed = None
    i = start
    n = len(t)
    while i < n:
        if not still[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and still[j + 1]:
            j += 1
        if t[j] - t[i] >= dwell - 1e-9:
            placed = float(t[i] + dwell)
            break
        i = j + 1

    def at(idx: Optional[int]) -> Optional[float]:
        return None if idx is None else float(t[idx])

    return Phases(at(i_lift), at(i_orient), at(i_desc), placed)
