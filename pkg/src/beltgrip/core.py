"""Domain types shared across the simulator.

All quantities are SI (m, kg, s, N, rad) except stiffness, which is kept in
N/mm because that is how finger stiffness is measured and reported.  Torque
given in kg·cm is converted once, at the config boundary, with
:data:`KGCM_TO_NM`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from beltgrip.compliance import StiffnessProfile

G = 9.81
KGCM_TO_NM = 0.0980665
FINGER_HEIGHT = 0.125
DEFAULT_LEVER_ARM = 0.05965


class ValidationError(ValueError):
    """A value violates a type invariant."""


class Shape(str, enum.Enum):
    CUBE = "cube"
    CYLINDER = "cylinder"
    SPHERE = "sphere"
    IRREGULAR = "irregular-convex-profile"


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")


def auto_inertia(spec: ObjectSpec) -> float:
    """Standard-formula moment of inertia about the grip axis.

    Sphere ``2/5 m r^2``, cylinder about its long axis ``1/2 m r^2``, cube
    ``1/6 m s^2`` with edge ``s = 2r``.
    """
    shape = Shape(spec.shape)
    _require(spec.mass > 0, "m_c > 0 violated")
    if shape is Shape.IRREGULAR or spec.radius is None:
        raise ValidationError("inertia required")
    m, r = spec.mass, spec.radius
    if shape is Shape.SPHERE:
        return 0.4 * m * r * r
    if shape is Shape.CYLINDER:
        return 0.5 * m * r * r
    side = 2.0 * r
    return m * side * side / 6.0


@dataclass(frozen=True)
class ObjectSpec:
    """The grasped body.

    ``radius`` is the half-width of the contact cross-section.  Spheres and
    cubes derive it from ``length`` when omitted; cylinders must supply it.
    Irregular profiles may leave it unset, in which case the object can be
    described but neither simulated nor reoriented.  ``inertia`` is filled
    from :func:`auto_inertia` unless given.
    """

    shape: Shape
    mass: float
    length: float
    radius: Optional[float] = None
    inertia: Optional[float] = None
    friction_override: Optional[float] = None

    def __post_init__(self) -> None:
        try:
            shape = Shape(self.shape)
        except ValueError:
            raise ValidationError(f"unknown shape {self.shape!r}") from None
        object.__setattr__(self, "shape", shape)
        _finite("mass", self.mass)
        _require(self.mass > 0, "m_c > 0 violated")
        _finite("length", self.length)
        _require(self.length > 0, "length > 0 violated")

        radius = self.radius
        if radius is None and shape in (Shape.SPHERE, Shape.CUBE):
            radius = self.length / 2.0
        if radius is None and shape is Shape.CYLINDER:
            raise ValidationError("cylinder radius required")
        if radius is not None:
            _finite("radius", radius)
            _require(radius > 0, "r > 0 violated")
        object.__setattr__(self, "radius", radius)

        inertia = self.inertia
        if inertia is None:
            inertia = auto_inertia(self)
        _finite("inertia", inertia)
        _require(inertia > 0, "I > 0 violated")
        object.__setattr__(self, "inertia", inertia)

        if self.friction_override is not None:
            _finite("friction_override", self.friction_override)
            _require(self.friction_override > 0, "friction_override > 0 violated")


@dataclass(frozen=True)
class GripperConfig:
    """Two belt-covered fingers facing each other across ``gap``."""

    gap: float
    mu_bo: float = 0.5
    tau_m: float = 3.4 * KGCM_TO_NM
    L_c: float = DEFAULT_LEVER_ARM
    belt_speed_limit: float = 0.5
    finger_height: float = FINGER_HEIGHT
    pulley_radius: Optional[float] = None
    stiffness_profile: Optional[StiffnessProfile] = field(default=None)

    def __post_init__(self) -> None:
        for name in ("gap", "mu_bo", "tau_m", "L_c", "belt_speed_limit", "finger_height"):
            _finite(name, getattr(self, name))
        _require(self.gap > 0, "gap > 0 violated")
        _require(0 < self.mu_bo <= 2, "mu_bo in (0, 2] violated")
        _require(self.tau_m > 0, "tau_m > 0 violated")
        _require(self.L_c > 0, "L_c > 0 violated")
        _require(self.belt_speed_limit > 0, "belt_speed_limit > 0 violated")
        _require(self.finger_height > 0, "finger_height > 0 violated")
        if self.pulley_radius is not None:
            _require(self.pulley_radius > 0, "pulley_radius > 0 violated")
        if self.stiffness_profile is None:
            from beltgrip.compliance import default_profile

            object.__setattr__(self, "stiffness_profile", default_profile())
        profile = self.stiffness_profile
        _require(
            profile.heights[-1] < self.finger_height,
            "stiffness heights must lie within (0, finger_height)",
        )

    @classmethod
    def from_kgcm(cls, gap: float, tau_kgcm: float, L_c_cm: float, **kw) -> GripperConfig:
        return cls(gap=gap, tau_m=tau_kgcm * KGCM_TO_NM, L_c=L_c_cm / 100.0, **kw)

    @property
    def region(self) -> tuple[float, float]:
        """Characterized contact heights ``(h1, h4)``."""
        return self.stiffness_profile.heights[0], self.stiffness_profile.heights[-1]


@dataclass(frozen=True)
class BodyState:
    """Planar object state: height along the finger axis and spin about the grip axis.

    ``alpha`` is never wrapped, so net rotation stays measurable.
    """

    x: float
    v: float = 0.0
    alpha: float = 0.0
    omega: float = 0.0
    in_contact: tuple[bool, bool] = (True, True)

    def __post_init__(self) -> None:
        for name in ("x", "v", "alpha", "omega"):
            _finite(name, getattr(self, name))
        object.__setattr__(self, "in_contact", tuple(bool(c) for c in self.in_contact))


@dataclass(frozen=True)
class BeltState:
    """One belt.  Positive speed and displacement mean upward surface motion."""

    v_cmd: float = 0.0
    v_actual: float = 0.0
    S: float = 0.0

    def __post_init__(self) -> None:
        for name in ("v_cmd", "v_actual", "S"):
            _finite(name, getattr(self, name))

    @classmethod
    def commanded(cls, v_cmd: float, limit: float, S: float = 0.0) -> BeltState:
        """Clamp ``v_cmd`` to ``limit``; the only place a value is clamped rather than rejected."""
        v = min(max(v_cmd, -limit), limit)
        return cls(v_cmd=v_cmd, v_actual=v, S=S)

    def command(self, v_cmd: float, limit: float) -> BeltState:
        return BeltState.commanded(v_cmd, limit, self.S)

    def advance(self, dt: float) -> BeltState:
        return replace(self, S=self.S + self.v_actual * dt)


@dataclass(frozen=True)
class ContactForces:
    """Per-belt forces on the object.  Shear is positive when it pushes the object up."""

    F_N_left: float = 0.0
    F_N_right: float = 0.0
    F_s_left: float = 0.0
    F_s_right: float = 0.0

    def __post_init__(self) -> None:
        for name in ("F_N_left", "F_N_right", "F_s_left", "F_s_right"):
            _finite(name, getattr(self, name))
        _require(self.F_N_left >= 0 and self.F_N_right >= 0, "F_N >= 0 violated")

    @property
    def net_shear(self) -> float:
        return self.F_s_left + self.F_s_right

    def torque(self, r: float) -> float:
        """Couple about the grip axis; positive when the right belt drags up."""
        return r * (self.F_s_right - self.F_s_left)

    def within_cone(self, mu: float, slack: float = 1e-12) -> bool:
        return (
            abs(self.F_s_left) <= mu * self.F_N_left + slack
            and abs(self.F_s_right) <= mu * self.F_N_right + slack
        )


@dataclass(frozen=True)
class Segment:
    duration: float
    v_L: float
    v_R: float

    def __post_init__(self) -> None:
        for name in ("duration", "v_L", "v_R"):
            _finite(name, getattr(self, name))
        _require(self.duration > 0, "segment duration > 0 violated")


@dataclass(frozen=True)
class BeltSchedule:
    """Piecewise-constant belt speed commands; both belts stop once it runs out."""

    segments: tuple[Segment, ...] = ()

    def __post_init__(self) -> None:
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        object.__setattr__(self, "segments", segs)

    @property
    def duration(self) -> float:
        return math.fsum(s.duration for s in self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def boundaries(self) -> list[float]:
        """Cumulative end time of each segment."""
        out, total = [], 0.0
        for s in self.segments:
            total += s.duration
            out.append(total)
        return out

    def speeds_at(self, t: float) -> tuple[float, float]:
        for end, seg in zip(self.boundaries(), self.segments):
            if t < end:
                return seg.v_L, seg.v_R
        return 0.0, 0.0

    def max_speed(self) -> float:
        return max((max(abs(s.v_L), abs(s.v_R)) for s in self.segments), default=0.0)

    def then(self, other: BeltSchedule) -> BeltSchedule:
        return BeltSchedule(self.segments + other.segments)

    def negated(self) -> BeltSchedule:
        return BeltSchedule(tuple(Segment(s.duration, -s.v_L, -s.v_R) for s in self.segments))

    def swapped(self) -> BeltSchedule:
        """Exchange left and right belts (reflection through the grip plane)."""
        return BeltSchedule(tuple(Segment(s.duration, s.v_R, s.v_L) for s in self.segments))
