"""Fixed-step integration of the gripped object's vertical and spin motion.

Vertical:  m x'' = F_sL + F_sR - m g
Spin:      I a''  = r (F_sR - F_sL)

Shear comes from the regularized friction law, whose slope near zero slip is
``mu F_N / v_eps``.  For gram-scale objects that slope makes an explicit
force evaluation unstable at any useful step size, so each step solves for
the end-of-step velocities with friction taken at those velocities
(backward Euler in the velocities), then advances positions with the new
velocities.  The solve is the minimisation of a strictly convex function, so
it has a unique answer, and the friction work it implies is never negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from beltgrip.compliance import OutOfRegionError, stiffness_at
from beltgrip.contact import GRASP_ANGLE, ContactParams, penetration
from beltgrip.core import (
    G,
    BeltSchedule,
    BeltState,
    BodyState,
    ContactForces,
    GripperConfig,
    ObjectSpec,
    ValidationError,
)

MAX_DT = 1e-3
_VEL_TOL = 1e-13
COLUMNS = ("t", "x", "v", "alpha", "omega", "S_L", "S_R", "F_N_L", "F_N_R", "F_s_L", "F_s_R")

COMPLETED = "completed"
DROPPED = "dropped"
EJECTED = "ejected"


class IntegrationDiverged(RuntimeError):
    pass


def vertical_acceleration(forces: ContactForces, spec: ObjectSpec, g: float = G) -> float:
    return (forces.F_s_left + forces.F_s_right - spec.mass * g) / spec.mass


def angular_acceleration(forces: ContactForces, spec: ObjectSpec) -> float:
    return spec.radius * (forces.F_s_right - forces.F_s_left) / spec.inertia


def _logcosh(z: float) -> float:
    a = abs(z)
    return a + math.log1p(math.exp(-2.0 * a)) - math.log(2.0)


def _implicit_velocities(
    v0: float,
    w0: float,
    vL: float,
    vR: float,
    NL: float,
    NR: float,
    m: float,
    I: float,
    r: float,
    mu: float,
    eps: float,
    dt: float,
    g: float,
) -> tuple[float, float]:
    """Damped Newton on the convex potential whose gradient is the step residual."""
    if NL == 0.0 and NR == 0.0:
        return v0 - dt * g, w0
    aL, aR = mu * NL, mu * NR
    grav = dt * m * g

    def potential(v: float, w: float) -> float:
        return (
            0.5 * m * (v - v0) ** 2
            + 0.5 * I * (w - w0) ** 2
            + grav * v
            + dt * eps * (aL * _logcosh((vL - v + w * r) / eps) + aR * _logcosh((vR - v - w * r) / eps))
        )

    v, w = v0, w0
    phi = potential(v, w)
    for _ in range(100):
        tL = math.tanh((vL - v + w * r) / eps)
        tR = math.tanh((vR - v - w * r) / eps)
        FL, FR = aL * tL, aR * tR
        R1 = m * (v - v0) - dt * (FL + FR) + grav
        R2 = I * (w - w0) - dt * r * (FR - FL)
        cL = aL * (1.0 - tL * tL) / eps
        cR = aR * (1.0 - tR * tR) / eps
        J11 = m + dt * (cL + cR)
        J12 = dt * r * (cR - cL)
        J22 = I + dt * r * r * (cL + cR)
        det = J11 * J22 - J12 * J12
        dv = -(J22 * R1 - J12 * R2) / det
        dw = -(J11 * R2 - J12 * R1) / det
        size = max(abs(dv), abs(dw * r))
        if size <= _VEL_TOL:
            return v + dv, w + dw
        if size < 0.1 * eps:
            # inside the quadratic basin; a line search here only chases round-off
            v, w = v + dv, w + dw
            phi = potential(v, w)
            continue
        lam = 1.0
        while True:
            vn, wn = v + lam * dv, w + lam * dw
            phin = potential(vn, wn)
            if phin <= phi or lam < 1e-12:
                break
            lam *= 0.5
        if vn == v and wn == w:
            return v, w
        v, w, phi = vn, wn, phin
    return v, w


def _advance(
    x: float,
    v: float,
    alpha: float,
    omega: float,
    vL: float,
    vR: float,
    spec: ObjectSpec,
    gripper: GripperConfig,
    depth: float,
    mu: float,
    eps: float,
    dt: float,
    g: float,
) -> tuple[float, ...]:
    """One step on plain floats; shared by :func:`step` and :func:`simulate`."""
    lo, hi = gripper.region
    if not lo <= x <= hi:
        raise OutOfRegionError(
            f"contact outside characterized finger region: x={x!r} not in [{lo}, {hi}]"
        )
    N = stiffness_at(gripper.stiffness_profile, x, GRASP_ANGLE) * depth if depth > 0 else 0.0
    m, I, r = spec.mass, spec.inertia, spec.radius
    v1, w1 = _implicit_velocities(v, omega, vL, vR, N, N, m, I, r, mu, eps, dt, g)
    if not (math.isfinite(v1) and math.isfinite(w1)):
        name = "v" if not math.isfinite(v1) else "omega"
        raise IntegrationDiverged(f"integration diverged: {name}={(v1 if name == 'v' else w1)!r}")
    FL = mu * N * math.tanh((vL - (v1 - w1 * r)) / eps)
    FR = mu * N * math.tanh((vR - (v1 + w1 * r)) / eps)

    v = v + dt * ((FL + FR - m * g) / m)
    omega = omega + dt * (r * (FR - FL) / I)
    x = x + dt * v
    alpha = alpha + dt * omega
    for name, value in (("x", x), ("v", v), ("alpha", alpha), ("omega", omega)):
        if not math.isfinite(value):
            raise IntegrationDiverged(f"integration diverged: {name}={value!r}")
    return x, v, alpha, omega, N, FL, FR


def step(
    body: BodyState,
    belts: tuple[BeltState, BeltState],
    spec: ObjectSpec,
    gripper: GripperConfig,
    params: ContactParams,
    dt: float,
    g: float = G,
) -> tuple[BodyState, tuple[BeltState, BeltState], ContactForces]:
    """Advance one step of length ``dt``.

    Returns the new body state, the belts with displacement advanced, and the
    contact forces that acted over the step.  The forces are those the
    contact law gives at the step's start height and end velocities.
    """
    if not 0 < dt <= MAX_DT:
        raise ValidationError(f"dt in (0, {MAX_DT}] violated: {dt!r}")
    left, right = belts
    depth = penetration(spec, gripper)
    x, v, alpha, omega, N, FL, FR = _advance(
        body.x, body.v, body.alpha, body.omega, left.v_actual, right.v_actual,
        spec, gripper, depth, params.mu_bo, params.v_eps, dt, g,
    )
    touching = depth > 0
    new_body = BodyState(x=x, v=v, alpha=alpha, omega=omega, in_contact=(touching, touching))
    return new_body, (left.advance(dt), right.advance(dt)), ContactForces(N, N, FL, FR)


@dataclass
class Trajectory:
    """Logged simulation output.

    Row ``k`` holds the state after step ``k + 1`` together with the forces
    that acted during that step, so the initial state (kept separately in
    ``initial``) is not itself a row.
    """

    columns: dict[str, np.ndarray]
    outcome: str = COMPLETED
    initial: BodyState | None = None
    initial_S: tuple[float, float] = (0.0, 0.0)
    dt: float | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, outcome: str = COMPLETED) -> Trajectory:
        return cls({c: np.zeros(0) for c in COLUMNS}, outcome)

    def __len__(self) -> int:
        return len(self.columns["t"])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def in_contact(self) -> np.ndarray:
        return (self.columns["F_N_L"] > 0) | (self.columns["F_N_R"] > 0)

    def final(self) -> dict[str, float]:
        return {c: float(self.columns[c][-1]) for c in COLUMNS}

    def decimate(self, every: int) -> Trajectory:
        """Keep every ``every``-th row, always including the last one."""
        if every < 1:
            raise ValidationError("decimation factor >= 1 violated")
        n = len(self)
        idx = np.arange(every - 1, n, every)
        if n and (idx.size == 0 or idx[-1] != n - 1):
            idx = np.append(idx, n - 1)
        cols = {c: a[idx] for c, a in self.columns.items()}
        return Trajectory(cols, self.outcome, self.initial, self.initial_S, None, dict(self.meta))

    def resample(self, rate_hz: float) -> Trajectory:
        if self.dt is None:
            raise ValidationError("resampling needs the native step size")
        return self.decimate(max(1, round(1.0 / (rate_hz * self.dt))))

    def equals(self, other: Trajectory) -> bool:
        return self.outcome == other.outcome and all(
            np.array_equal(self.columns[c], other.columns[c]) for c in COLUMNS
        )


def simulate(
    spec: ObjectSpec,
    gripper: GripperConfig,
    params: ContactParams,
    initial: BodyState,
    schedule: BeltSchedule,
    dt: float,
    t_end: float,
    record_every: int = 1,
    g: float = G,
) -> Trajectory:
    """Run ``schedule`` from ``initial`` until ``t_end``.

    Leaving the characterised finger region ends the run early with outcome
    ``dropped`` (below the lowest knot) or ``ejected`` (above the highest).
    """
    if not 0 < dt <= MAX_DT:
        raise ValidationError(f"dt in (0, {MAX_DT}] violated: {dt!r}")
    if t_end < 0:
        raise ValidationError("t_end >= 0 violated")
    lo, hi = gripper.region
    limit = gripper.belt_speed_limit
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    ends = schedule.boundaries()
    segs = schedule.segments
    depth = penetration(spec, gripper)
    touching = depth > 0

    rows: list[tuple[float, ...]] = []
    x, v, alpha, omega = initial.x, initial.v, initial.alpha, initial.omega
    S_L = S_R = 0.0
    mu, eps = params.mu_bo, params.v_eps
    outcome = COMPLETED
    seg = 0
    for k in range(n_steps):
        # look up commands at the step midpoint so segment edges never straddle a step
        t_mid = (k + 0.5) * dt
        while seg < len(segs) and t_mid >= ends[seg]:
            seg += 1
        cmd_L, cmd_R = (segs[seg].v_L, segs[seg].v_R) if seg < len(segs) else (0.0, 0.0)
        vL = min(max(cmd_L, -limit), limit)
        vR = min(max(cmd_R, -limit), limit)
        x, v, alpha, omega, N, FL, FR = _advance(
            x, v, alpha, omega, vL, vR, spec, gripper, depth, mu, eps, dt, g
        )
        S_L = S_L + vL * dt
        S_R = S_R + vR * dt
        if x < lo:
            outcome = DROPPED
        elif x > hi:
            outcome = EJECTED
        last = outcome != COMPLETED or k == n_steps - 1
        if (k + 1) % record_every == 0 or last:
            rows.append(((k + 1) * dt, x, v, alpha, omega, S_L, S_R, N, N, FL, FR))
        if outcome != COMPLETED:
            break

    if rows:
        data = np.array(rows, dtype=float)
        cols = {c: data[:, i].copy() for i, c in enumerate(COLUMNS)}
    else:
        cols = {c: np.zeros(0) for c in COLUMNS}
    return Trajectory(
        cols,
        outcome,
        initial=BodyState(initial.x, initial.v, initial.alpha, initial.omega, (touching, touching)),
        dt=dt * record_every,
        meta={"step": dt, "record_every": record_every, "mass": spec.mass, "inertia": spec.inertia},
    )


def energy_audit(traj: Trajectory, spec: ObjectSpec, g: float = G) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative belt work and cumulative change in object energy, per row.

    Belt work uses the shear logged with each row times the belt travel over
    that row, so it is only meaningful on undecimated trajectories.
    """
    if traj.initial is None:
        raise ValidationError("energy audit needs the initial state")
    c = traj.columns
    m, I = spec.mass, spec.inertia
    S_L = np.concatenate(([traj.initial_S[0]], c["S_L"]))
    S_R = np.concatenate(([traj.initial_S[1]], c["S_R"]))
    work = np.cumsum(c["F_s_L"] * np.diff(S_L) + c["F_s_R"] * np.diff(S_R))
    b0 = traj.initial
    e0 = 0.5 * m * b0.v**2 + 0.5 * I * b0.omega**2 + m * g * b0.x
    e = 0.5 * m * c["v"] ** 2 + 0.5 * I * c["omega"] ** 2 + m * g * c["x"]
    return work, e - e0


def energy_balanced(traj: Trajectory, spec: ObjectSpec, slack: float = 1e-9, g: float = G) -> bool:
    """Belt work never falls short of the object's energy gain (friction only dissipates)."""
    work, gain = energy_audit(traj, spec, g)
    return bool(np.all(work >= gain - slack))
