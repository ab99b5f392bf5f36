"""Seeded Monte Carlo trials over perturbed scenarios."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from beltgrip.core import BodyState, ValidationError
from beltgrip.dynamics import COMPLETED
from beltgrip.harness.scenario import Scenario

SUCCESS = "success"
OFF_TARGET = "off-target"
ERROR = "error"

DEFAULT_TOL_X = 0.005
DEFAULT_TOL_ALPHA = math.radians(5.0)


@dataclass(frozen=True)
class PerturbationModel:
    """Uniform half-widths for per-trial jitter, plus the master seed."""

    mu_jitter: float = 0.0
    x0_jitter: float = 0.0
    r_jitter: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("mu_jitter", "x0_jitter", "r_jitter"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{name} >= 0 violated")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SuccessSpec:
    """What counts as success: net displacement and/or net rotation within tolerance."""

    target_dx: Optional[float] = None
    target_alpha: Optional[float] = None
    tol_x: float = DEFAULT_TOL_X
    tol_alpha: float = DEFAULT_TOL_ALPHA

    def __post_init__(self) -> None:
        if self.target_dx is None and self.target_alpha is None:
            raise ValidationError("success spec needs target_dx or target_alpha")
        if not (self.tol_x > 0 and self.tol_alpha > 0):
            raise ValidationError("tolerances > 0 violated")


@dataclass(frozen=True)
class TrialResult:
    outcome: str
    final_x: Optional[float]
    final_alpha: Optional[float]
    mu: Optional[float]
    reason: str = ""


@dataclass(frozen=True)
class TrialReport:
    n: int
    successes: int
    trials: tuple[TrialResult, ...]
    seed: int

    @property
    def outcomes(self) -> tuple[str, ...]:
        return tuple(t.outcome for t in self.trials)

    @property
    def rate(self) -> float:
        return self.successes / self.n

    def count(self, outcome: str) -> int:
        return sum(1 for t in self.trials if t.outcome == outcome)

    def summary(self) -> str:
        return (
            f"n={self.n} successes={self.successes} rate={self.rate:.3f} seed={self.seed} "
            f"dropped={self.count('dropped')} ejected={self.count('ejected')} "
            f"off_target={self.count(OFF_TARGET)} error={self.count(ERROR)}"
        )


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial ``index``, stable regardless of execution order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def perturb(scenario: Scenario, model: PerturbationModel, index: int) -> Scenario:
    """The scenario as seen by trial ``index``."""
    u_mu, u_x, u_r = trial_rng(model.seed, index).uniform(-1.0, 1.0, 3)
    base = scenario.params
    mu = base.mu_bo + model.mu_jitter * u_mu
    if not mu > 0:
        raise ValidationError(f"perturbed mu > 0 violated ({mu!r})")
    obj = replace(scenario.object, friction_override=mu, radius=scenario.object.radius + model.r_jitter * u_r)
    b = scenario.initial
    initial = BodyState(b.x + model.x0_jitter * u_x, b.v, b.alpha, b.omega)
    return replace(scenario, object=obj, initial=initial)


def judge(initial: BodyState, final_x: float, final_alpha: float, outcome: str, success: SuccessSpec) -> str:
    if outcome != COMPLETED:
        return outcome
    if success.target_dx is not None and abs(final_x - initial.x - success.target_dx) > success.tol_x:
        return OFF_TARGET
    if success.target_alpha is not None and abs(final_alpha - initial.alpha - success.target_alpha) > success.tol_alpha:
        return OFF_TARGET
    return SUCCESS


def run_trial(scenario: Scenario, model: PerturbationModel, index: int, success: SuccessSpec) -> TrialResult:
    mu = None
    try:
        sc = perturb(scenario, model, index)
        mu = sc.object.friction_override
        traj = sc.simulate(record_every=10**9)
    except (ValueError, RuntimeError) as exc:
        return TrialResult(ERROR, None, None, mu, str(exc))
    if len(traj):
        x, alpha = float(traj["x"][-1]), float(traj["alpha"][-1])
    else:
        x, alpha = sc.initial.x, sc.initial.alpha
    outcome = judge(sc.initial, x, alpha, traj.outcome, success)
    return TrialResult(outcome, x, alpha, mu)


def _run_one(args: tuple) -> TrialResult:
    return run_trial(*args)


def run_trials(
    scenario: Scenario,
    perturbation: PerturbationModel,
    n: int,
    success: SuccessSpec,
    workers: int = 1,
) -> TrialReport:
    """Run ``n`` perturbed simulations; the report depends only on the inputs.

    Each trial draws from its own seed stream, so ``workers > 1`` gives the
    same report as a serial run.
    """
    if n < 1:
        raise ValidationError("n >= 1 violated")
    jobs = [(scenario, perturbation, i, success) for i in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = tuple(pool.map(_run_one, jobs))
    else:
        results = tuple(_run_one(j) for j in jobs)
    successes = sum(1 for r in results if r.outcome == SUCCESS)
    return TrialReport(n=n, successes=successes, trials=results, seed=perturbation.seed)
