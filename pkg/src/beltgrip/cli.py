"""Command-line entry point.

Errors go to stderr as a single line ``error: <Kind>: <message>`` with exit
status 1; bad usage exits 2 via argparse.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

from beltgrip.core import KGCM_TO_NM, BeltSchedule
from beltgrip.harness.export import export_trajectory, format_trajectory, read_trajectory
from beltgrip.harness.scenario import dump_scenario, load_scenario
from beltgrip.harness.trials import PerturbationModel, SuccessSpec, run_trials
from beltgrip.primitives import detect_phases, max_payload, plan_reorient, plan_reposition


def _schedule_out(schedule: BeltSchedule, as_csv: bool) -> None:
    if as_csv:
        print("duration,v_L,v_R")
        for s in schedule.segments:
            print(f"{s.duration!r},{s.v_L!r},{s.v_R!r}")
        return
    if not len(schedule):
        print("empty schedule")
        return
    for i, s in enumerate(schedule.segments):
        print(f"segment {i}: duration={s.duration:.6g} s v_L={s.v_L:.6g} m/s v_R={s.v_R:.6g} m/s")


def cmd_simulate(args: argparse.Namespace) -> int:
    sc = load_scenario(args.scenario)
    if args.echo:
        sys.stdout.write(dump_scenario(sc))
    traj = sc.simulate(dt=args.dt)
    if args.decimate > 1:
        traj = traj.decimate(args.decimate)
    if args.out:
        export_trajectory(traj, args.out)
    if args.csv:
        sys.stdout.write(format_trajectory(traj))
        return 0
    if len(traj):
        f = traj.final()
        print(
            f"outcome={traj.outcome} t={f['t']:.6g} x={f['x']:.6g} v={f['v']:.6g} "
            f"alpha={f['alpha']:.6g} omega={f['omega']:.6g} S_L={f['S_L']:.6g} S_R={f['S_R']:.6g}"
        )
    else:
        print(f"outcome={traj.outcome} rows=0")
    return 0


def cmd_plan(args: argparse.Namespace) -> int:
    sc = load_scenario(args.scenario)
    if args.kind == "reposition":
        schedule = plan_reposition(args.dx, args.speed, sc.gripper, sc.object, sc.initial.x, sc.params)
    else:
        schedule = plan_reorient(
            math.radians(args.alpha), args.speed, sc.object, sc.gripper.belt_speed_limit
        )
    _schedule_out(schedule, args.csv)
    return 0


def cmd_payload(args: argparse.Namespace) -> int:
    g_max = max_payload(args.mu, args.torque_kgcm * KGCM_TO_NM, args.lc_cm / 100.0)
    if args.csv:
        print("G_max_kg")
        print(repr(g_max))
    else:
        print(f"{g_max:.3f} kg")
    return 0


def cmd_trials(args: argparse.Namespace) -> int:
    sc = load_scenario(args.scenario)
    if args.dt is not None:
        from dataclasses import replace

        sc = replace(sc, dt=args.dt)
    if args.target_dx is not None:
        success = SuccessSpec(target_dx=args.target_dx, tol_x=args.tol)
    else:
        success = SuccessSpec(target_alpha=math.radians(args.target_alpha), tol_alpha=math.radians(args.tol))
    model = PerturbationModel(
        mu_jitter=args.mu_jitter, x0_jitter=args.x0_jitter, r_jitter=args.r_jitter, seed=args.seed
    )
    report = run_trials(sc, model, args.n, success, workers=args.workers)
    if args.csv:
        print("trial,outcome,final_x,final_alpha,mu")
        for i, t in enumerate(report.trials):
            print(f"{i},{t.outcome},{t.final_x!r},{t.final_alpha!r},{t.mu!r}")
    else:
        print(report.summary())
    return 0


def cmd_phases(args: argparse.Namespace) -> int:
    traj = read_trajectory(args.traj)
    ph = detect_phases(traj, v_min=args.v_min, omega_min=args.omega_min, dwell=args.dwell)
    names = ("contact_lift", "orient_start", "descent_start", "stable_placement")
    values = ["not reached" if v is None else repr(v) for v in ph.as_tuple()]
    if args.csv:
        print(",".join(names))
        print(",".join(values))
    else:
        print(" ".join(f"{n}={v}" for n, v in zip(names, values)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beltgrip", description="Belt-driven in-hand manipulation simulator")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a scenario file")
    s.add_argument("--scenario", required=True)
    s.add_argument("--dt", type=float)
    s.add_argument("--out", help="write the trajectory CSV here")
    s.add_argument("--decimate", type=int, default=1, help="keep every k-th row")
    s.add_argument("--echo", action="store_true", help="print the resolved scenario first")
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_simulate)

    pl = sub.add_parser("plan", help="plan belt commands")
    kinds = pl.add_subparsers(dest="kind", required=True)
    rp = kinds.add_parser("reposition")
    rp.add_argument("--dx", type=float, required=True, help="m")
    rp.add_argument("--speed", type=float, required=True, help="m/s")
    rp.add_argument("--scenario", required=True)
    rp.add_argument("--csv", action="store_true")
    ro = kinds.add_parser("reorient")
    ro.add_argument("--alpha", type=float, required=True, help="deg")
    ro.add_argument("--speed", type=float, required=True, help="m/s")
    ro.add_argument("--scenario", required=True)
    ro.add_argument("--csv", action="store_true")
    pl.set_defaults(func=cmd_plan)

    pa = sub.add_parser("payload", help="motor-limited payload estimate")
    pa.add_argument("--mu", type=float, required=True)
    pa.add_argument("--torque-kgcm", type=float, required=True)
    pa.add_argument("--lc-cm", type=float, required=True)
    pa.add_argument("--csv", action="store_true")
    pa.set_defaults(func=cmd_payload)

    tr = sub.add_parser("trials", help="seeded Monte Carlo trials")
    tr.add_argument("--scenario", required=True)
    tr.add_argument("--n", type=int, required=True)
    tr.add_argument("--seed", type=int, required=True)
    tr.add_argument("--mu-jitter", type=float, default=0.0)
    tr.add_argument("--x0-jitter", type=float, default=0.0, help="m")
    tr.add_argument("--r-jitter", type=float, default=0.0, help="m")
    target = tr.add_mutually_exclusive_group(required=True)
    target.add_argument("--target-dx", type=float, help="m")
    target.add_argument("--target-alpha", type=float, help="deg")
    tr.add_argument("--tol", type=float, required=True, help="m for --target-dx, deg for --target-alpha")
    tr.add_argument("--dt", type=float)
    tr.add_argument("--workers", type=int, default=1)
    tr.add_argument("--csv", action="store_true")
    tr.set_defaults(func=cmd_trials)

    ph = sub.add_parser("phases", help="detect manipulation phases in a trajectory CSV")
    ph.add_argument("--traj", required=True)
    ph.add_argument("--v-min", type=float, default=1e-3)
    ph.add_argument("--omega-min", type=float, default=0.01)
    ph.add_argument("--dwell", type=float, default=0.2)
    ph.add_argument("--csv", action="store_true")
    ph.set_defaults(func=cmd_phases)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
