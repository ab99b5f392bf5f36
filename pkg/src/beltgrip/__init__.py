"""Simulation and planning for objects held between two belt-driven compliant fingers."""

from beltgrip.compliance import StiffnessProfile, default_profile, normal_force, stiffness_at
from beltgrip.contact import ContactParams, contact_forces, penetration, shear_force
from beltgrip.core import (
    G,
    KGCM_TO_NM,
    BeltSchedule,
    BeltState,
    BodyState,
    ContactForces,
    GripperConfig,
    ObjectSpec,
    Segment,
    Shape,
    ValidationError,
    auto_inertia,
)
from beltgrip.dynamics import Trajectory, angular_acceleration, simulate, step, vertical_acceleration
from beltgrip.primitives import (
    detect_phases,
    max_payload,
    plan_reorient,
    plan_reposition,
    reorientation_angle,
)

__version__ = "0.1.0"

__all__ = [
    "G",
    "KGCM_TO_NM",
    "BeltSchedule",
    "BeltState",
    "BodyState",
    "ContactForces",
    "ContactParams",
    "GripperConfig",
    "ObjectSpec",
    "Segment",
    "Shape",
    "StiffnessProfile",
    "Trajectory",
    "ValidationError",
    "angular_acceleration",
    "auto_inertia",
    "contact_forces",
    "default_profile",
    "detect_phases",
    "max_payload",
    "normal_force",
    "penetration",
    "plan_reorient",
    "plan_reposition",
    "reorientation_angle",
    "shear_force",
    "simulate",
    "step",
    "stiffness_at",
    "vertical_acceleration",
]
