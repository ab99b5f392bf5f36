"""Belt/object contact: spring normal force and regularized Coulomb shear."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from beltgrip.compliance import MAX_DEPTH_MM, OutOfRegionError, normal_force
from beltgrip.core import BeltState, BodyState, ContactForces, GripperConfig, ObjectSpec, ValidationError

GRASP_ANGLE = 0.0


@dataclass(frozen=True)
class ContactParams:
    """Friction law parameters.

    ``v_eps`` sets the width of the smooth stick/slip transition; slip well
    beyond it gives full Coulomb friction.
    """

    mu_bo: float = 0.5
    v_eps: float = 1e-3

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu_bo) and self.mu_bo > 0):
            raise ValidationError("mu_bo > 0 violated")
        if not (math.isfinite(self.v_eps) and self.v_eps > 0):
            raise ValidationError("v_eps > 0 violated")

    @property
    def restitution(self) -> float:
        return 0.0


def effective_params(spec: ObjectSpec, params: ContactParams) -> ContactParams:
    """Apply the object's friction override, if any."""
    if spec.friction_override is None:
        return params
    return replace(params, mu_bo=spec.friction_override)


def _radius(spec: ObjectSpec) -> float:
    if spec.radius is None:
        raise ValidationError("contact requires cross-section radius")
    return spec.radius


def penetration(spec: ObjectSpec, gripper: GripperConfig) -> float:
    """Spring compression per side in mm for an object centred between the belts."""
    depth = (2.0 * _radius(spec) - gripper.gap) / 2.0 * 1000.0
    if depth <= 0:
        return 0.0
    if depth > MAX_DEPTH_MM:
        raise OutOfRegionError(
            f"beyond characterized compression depth: {depth:.6g} mm > {MAX_DEPTH_MM} mm"
        )
    return depth


def shear_force(F_N: float, v_slip: float, params: ContactParams) -> float:
    """Regularized Coulomb friction, odd and strictly increasing in ``v_slip``."""
    if F_N < 0:
        raise ValidationError("F_N >= 0 violated")
    return params.mu_bo * F_N * math.tanh(v_slip / params.v_eps)


def slip_velocities(body: BodyState, v_left: float, v_right: float, r: float) -> tuple[float, float]:
    """Belt speed minus object surface speed at each contact.

    Spin ``omega > 0`` moves the right contact up and the left one down.
    """
    return v_left - (body.v - body.omega * r), v_right - (body.v + body.omega * r)


def grip_normal_forces(spec: ObjectSpec, gripper: GripperConfig, h: float) -> tuple[float, float]:
    """Normal force per side (N) with the object centred at height ``h``."""
    lo, hi = gripper.region
    if not lo <= h <= hi:
        raise OutOfRegionError(
            f"contact outside characterized finger region: x={h!r} not in [{lo}, {hi}]"
        )
    depth = penetration(spec, gripper)
    f = normal_force(gripper.stiffness_profile, depth, h, GRASP_ANGLE)
    return f, f


def contact_forces(
    body: BodyState,
    belts: tuple[BeltState, BeltState],
    spec: ObjectSpec,
    gripper: GripperConfig,
    params: ContactParams,
) -> ContactForces:
    F_NL, F_NR = grip_normal_forces(spec, gripper, body.x)
    s_L, s_R = slip_velocities(body, belts[0].v_actual, belts[1].v_actual, _radius(spec))
    return ContactForces(
        F_N_left=F_NL,
        F_N_right=F_NR,
        F_s_left=shear_force(F_NL, s_L, params),
        F_s_right=shear_force(F_NR, s_R, params),
    )
