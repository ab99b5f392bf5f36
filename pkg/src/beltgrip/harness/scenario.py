"""Scenario files: strict YAML schema, validation, defaults, round-tripping.

A scenario file has a ``schema_version`` and these sections::

    schema_version: 1
    name: sphere-demo                   # optional
    object:       {shape, mass, length, radius?, inertia?, friction_override?}
    gripper:      {gap, mu_bo?, tau_m? | tau_m_kgcm?, L_c?, belt_speed_limit?,
                   finger_height?, pulley_radius?}
    contact:      {mu_bo?, v_eps?}     # mu_bo defaults to gripper.mu_bo
    stiffness_profile: {angles, heights, k} | {heights?, angle_scales?}
    schedule:     [{duration, v_L, v_R} | {duration, omega_L, omega_R}, ...]
    simulation:   {x0, v0?, alpha0?, omega0?, dt?, t_end?, record_every?}

Units are SI.  Belt speeds may be given as pulley angular velocity (rad/s)
when ``gripper.pulley_radius`` is set.  Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from beltgrip.compliance import StiffnessProfile, default_profile
from beltgrip.contact import ContactParams, effective_params
from beltgrip.core import (
    KGCM_TO_NM,
    BeltSchedule,
    BodyState,
    GripperConfig,
    ObjectSpec,
    Segment,
    ValidationError,
)
from beltgrip.dynamics import MAX_DT, Trajectory, simulate

SCHEMA_VERSION = 1
DEFAULT_DT = 1e-4

_SECTIONS = {
    "schema_version", "name", "object", "gripper", "contact",
    "stiffness_profile", "schedule", "simulation",
}
_OBJECT_KEYS = {"shape", "mass", "length", "radius", "inertia", "friction_override"}
_GRIPPER_KEYS = {
    "gap", "mu_bo", "tau_m", "tau_m_kgcm", "L_c", "belt_speed_limit",
    "finger_height", "pulley_radius",
}
_CONTACT_KEYS = {"mu_bo", "v_eps"}
_PROFILE_KEYS = {"angles", "heights", "k", "angle_scales"}
_SIM_KEYS = {"x0", "v0", "alpha0", "omega0", "dt", "t_end", "record_every"}


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    object: ObjectSpec
    gripper: GripperConfig
    contact: ContactParams
    initial: BodyState
    schedule: BeltSchedule
    dt: float = DEFAULT_DT
    t_end: float = 0.0
    record_every: int = 1
    name: str = ""

    def __post_init__(self) -> None:
        if not 0 < self.dt <= MAX_DT:
            raise ValidationError(f"dt in (0, {MAX_DT}] violated")
        if self.t_end < self.schedule.duration - 1e-12:
            raise ValidationError("t_end >= schedule duration violated")
        if self.record_every < 1:
            raise ValidationError("record_every >= 1 violated")
        if self.schedule.max_speed() > self.gripper.belt_speed_limit:
            raise ValidationError("schedule speeds within belt_speed_limit violated")
        lo, hi = self.gripper.region
        if not lo <= self.initial.x <= hi:
            raise ValidationError(f"initial x within [{lo}, {hi}] violated")
        if self.object.radius is None:
            raise ValidationError("simulation requires cross-section radius")

    @property
    def params(self) -> ContactParams:
        """Contact parameters with the object's friction override applied."""
        return effective_params(self.object, self.contact)

    def simulate(self, dt: Optional[float] = None, record_every: Optional[int] = None) -> Trajectory:
        return simulate(
            self.object,
            self.gripper,
            self.params,
            self.initial,
            self.schedule,
            dt or self.dt,
            self.t_end,
            record_every or self.record_every,
        )

    def with_schedule(self, schedule: BeltSchedule, settle: float = 0.0) -> Scenario:
        """Swap in ``schedule`` and set ``t_end`` to its duration plus ``settle``."""
        return replace(self, schedule=schedule, t_end=schedule.duration + settle)


def _section(raw: dict, key: str, allowed: set[str], required: bool = True) -> dict:
    if key not in raw:
        if required:
            raise ScenarioError(f"missing required field {key!r}")
        return {}
    sec = raw[key]
    if not isinstance(sec, dict):
        raise ScenarioError(f"section {key!r} must be a mapping")
    for k in sec:
        if k not in allowed:
            raise ScenarioError(f"unknown field {k!r} in section {key!r}")
    return sec


def _need(sec: dict, section: str, key: str) -> Any:
    if key not in sec:
        raise ScenarioError(f"missing required field '{section}.{key}'")
    return sec[key]


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where} must be a number, got {value!r}")
    return float(value)


def _opt(sec: dict, key: str, where: str) -> Optional[float]:
    return None if sec.get(key) is None else _num(sec[key], f"{where}.{key}")


def scenario_from_dict(raw: dict) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a mapping")
    for k in raw:
        if k not in _SECTIONS:
            raise ScenarioError(f"unknown field {k!r}")
    version = raw.get("schema_version")
    if version is None:
        raise ScenarioError("missing required field 'schema_version'")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version!r}")

    try:
        obj = _section(raw, "object", _OBJECT_KEYS)
        spec = ObjectSpec(
            shape=_need(obj, "object", "shape"),
            mass=_num(_need(obj, "object", "mass"), "object.mass"),
            length=_num(_need(obj, "object", "length"), "object.length"),
            radius=_opt(obj, "radius", "object"),
            inertia=_opt(obj, "inertia", "object"),
            friction_override=_opt(obj, "friction_override", "object"),
        )

        prof = _section(raw, "stiffness_profile", _PROFILE_KEYS, required=False)
        if "k" in prof:
            if "angle_scales" in prof:
                raise ScenarioError("stiffness_profile: give either k or angle_scales, not both")
            profile = StiffnessProfile(
                angles=tuple(_need(prof, "stiffness_profile", "angles")),
                heights=tuple(_need(prof, "stiffness_profile", "heights")),
                k=tuple(tuple(row) for row in prof["k"]),
            )
        else:
            if "angles" in prof:
                raise ScenarioError("stiffness_profile.angles needs an explicit k matrix")
            kw = {}
            if "heights" in prof:
                kw["heights"] = tuple(prof["heights"])
            if "angle_scales" in prof:
                kw["angle_scales"] = tuple(prof["angle_scales"])
            profile = default_profile(**kw)

        grip = _section(raw, "gripper", _GRIPPER_KEYS)
        if "tau_m" in grip and "tau_m_kgcm" in grip:
            raise ScenarioError("gripper: give either tau_m or tau_m_kgcm, not both")
        gkw: dict[str, Any] = {"gap": _num(_need(grip, "gripper", "gap"), "gripper.gap")}
        for key in ("mu_bo", "tau_m", "L_c", "belt_speed_limit", "finger_height", "pulley_radius"):
            if grip.get(key) is not None:
                gkw[key] = _num(grip[key], f"gripper.{key}")
        if "tau_m_kgcm" in grip:
            gkw["tau_m"] = _num(grip["tau_m_kgcm"], "gripper.tau_m_kgcm") * KGCM_TO_NM
        gripper = GripperConfig(stiffness_profile=profile, **gkw)

        con = _section(raw, "contact", _CONTACT_KEYS, required=False)
        contact = ContactParams(
            mu_bo=_num(con.get("mu_bo", gripper.mu_bo), "contact.mu_bo"),
            v_eps=_num(con.get("v_eps", 1e-3), "contact.v_eps"),
        )

        schedule = _parse_schedule(raw.get("schedule", []), gripper)

        sim = _section(raw, "simulation", _SIM_KEYS)
        initial = BodyState(
            x=_num(_need(sim, "simulation", "x0"), "simulation.x0"),
            v=_num(sim.get("v0", 0.0), "simulation.v0"),
            alpha=_num(sim.get("alpha0", 0.0), "simulation.alpha0"),
            omega=_num(sim.get("omega0", 0.0), "simulation.omega0"),
        )
        record_every = sim.get("record_every", 1)
        if not isinstance(record_every, int) or isinstance(record_every, bool):
            raise ScenarioError("simulation.record_every must be an integer")
        t_end = sim.get("t_end")
        return Scenario(
            object=spec,
            gripper=gripper,
            contact=contact,
            initial=initial,
            schedule=schedule,
            dt=_num(sim.get("dt", DEFAULT_DT), "simulation.dt"),
            t_end=schedule.duration if t_end is None else _num(t_end, "simulation.t_end"),
            record_every=record_every,
            name=str(raw.get("name", "")),
        )
    except ValidationError as exc:
        raise ScenarioError(str(exc)) from exc
    except TypeError as exc:
        raise ScenarioError(f"malformed value: {exc}") from exc


def _parse_schedule(items: Any, gripper: GripperConfig) -> BeltSchedule:
    if not isinstance(items, list):
        raise ScenarioError("schedule must be a list of segments")
    segs = []
    for i, item in enumerate(items):
        where = f"schedule[{i}]"
        if not isinstance(item, dict):
            raise ScenarioError(f"{where} must be a mapping")
        keys = set(item)
        if keys == {"duration", "v_L", "v_R"}:
            vL, vR = _num(item["v_L"], f"{where}.v_L"), _num(item["v_R"], f"{where}.v_R")
        elif keys == {"duration", "omega_L", "omega_R"}:
            if gripper.pulley_radius is None:
                raise ScenarioError(f"{where}: omega_L/omega_R need gripper.pulley_radius")
            rp = gripper.pulley_radius
            vL = _num(item["omega_L"], f"{where}.omega_L") * rp
            vR = _num(item["omega_R"], f"{where}.omega_R") * rp
        else:
            extra = sorted(keys - {"duration", "v_L", "v_R", "omega_L", "omega_R"})
            if extra:
                raise ScenarioError(f"unknown field {extra[0]!r} in {where}")
            raise ScenarioError(f"{where} needs duration and either v_L/v_R or omega_L/omega_R")
        segs.append(Segment(_num(item["duration"], f"{where}.duration"), vL, vR))
    return BeltSchedule(tuple(segs))


def scenario_to_dict(sc: Scenario) -> dict:
    """Fully resolved form; loading it back gives an equal Scenario."""
    o, g, p = sc.object, sc.gripper, sc.gripper.stiffness_profile
    obj = {"shape": o.shape.value, "mass": o.mass, "length": o.length,
           "radius": o.radius, "inertia": o.inertia}
    if o.friction_override is not None:
        obj["friction_override"] = o.friction_override
    grip = {"gap": g.gap, "mu_bo": g.mu_bo, "tau_m": g.tau_m, "L_c": g.L_c,
            "belt_speed_limit": g.belt_speed_limit, "finger_height": g.finger_height}
    if g.pulley_radius is not None:
        grip["pulley_radius"] = g.pulley_radius
    out = {
        "schema_version": SCHEMA_VERSION,
        "object": obj,
        "gripper": grip,
        "contact": {"mu_bo": sc.contact.mu_bo, "v_eps": sc.contact.v_eps},
        "stiffness_profile": {
            "angles": list(p.angles),
            "heights": list(p.heights),
            "k": [list(row) for row in p.k],
        },
        "schedule": [{"duration": s.duration, "v_L": s.v_L, "v_R": s.v_R} for s in sc.schedule.segments],
        "simulation": {
            "x0": sc.initial.x, "v0": sc.initial.v, "alpha0": sc.initial.alpha,
            "omega0": sc.initial.omega, "dt": sc.dt, "t_end": sc.t_end,
            "record_every": sc.record_every,
        },
    }
    if sc.name:
        out["name"] = sc.name
    return out


def dump_scenario(sc: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(sc), sort_keys=False)


def loads_scenario(text: str) -> Scenario:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"parse error: {exc}") from exc
    return scenario_from_dict(raw)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from exc
    return loads_scenario(text)


def bundled_names() -> list[str]:
    root = resources.files("beltgrip") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def bundled_path(name: str) -> Path:
    path = Path(str(resources.files("beltgrip") / "scenarios" / f"{name}.yaml"))
    if not path.exists():
        raise ScenarioError(f"no bundled scenario {name!r}; have {bundled_names()}")
    return path


def bundled_scenario(name: str) -> Scenario:
    return load_scenario(bundled_path(name))
