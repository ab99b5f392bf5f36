import math
import textwrap

import numpy as np
import pytest
import yaml

from beltgrip import cli
from beltgrip.compliance import stiffness_at
from beltgrip.core import BeltSchedule
from beltgrip.dynamics import DROPPED, Trajectory
from beltgrip.harness import (
    HEADER,
    PerturbationModel,
    ScenarioError,
    SuccessSpec,
    bundled_names,
    bundled_path,
    bundled_scenario,
    dump_scenario,
    export_trajectory,
    format_trajectory,
    load_scenario,
    loads_scenario,
    read_trajectory,
    run_trials,
    scenario_from_dict,
)
from beltgrip.harness.trials import ERROR, OFF_TARGET, SUCCESS, perturb, trial_rng
from beltgrip.primitives import gap_for_normal_force, required_normal_force

MINIMAL = textwrap.dedent(
    """\
    schema_version: 1
    object: {shape: sphere, mass: 0.04215, length: 0.055}
    gripper: {gap: 0.050}
    schedule:
      - {duration: 0.01, v_L: 0.05, v_R: 0.05}
    simulation: {x0: 0.03}
    """
)


def raw(**patch):
    data = yaml.safe_load(MINIMAL)
    for path, value in patch.items():
        section, _, key = path.partition("__")
        if key:
            data[section][key] = value
        else:
            data[section] = value
    return data


# --- scenario files ----------------------------------------------------------


def test_minimal_scenario_defaults(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text(MINIMAL)
    sc = load_scenario(path)
    assert sc.object.inertia == pytest.approx(1.2750e-5, rel=1e-4)
    assert sc.dt == 1e-4
    assert sc.t_end == pytest.approx(0.01)
    assert sc.contact.mu_bo == sc.gripper.mu_bo == 0.5
    assert sc.gripper.stiffness_profile.k[0] == pytest.approx((1.699, 1.2685, 0.838, 1.051))
    # defaults are echoed back in the resolved dump
    echoed = yaml.safe_load(dump_scenario(sc))
    assert echoed["simulation"]["dt"] == 1e-4
    assert echoed["object"]["inertia"] == sc.object.inertia


def test_zero_mass_rejected():
    with pytest.raises(ScenarioError, match=r"m_c > 0 violated"):
        scenario_from_dict(raw(object__mass=0))


def test_unknown_field_named():
    with pytest.raises(ScenarioError, match="colour"):
        scenario_from_dict(raw(object__colour="blue"))
    with pytest.raises(ScenarioError, match="colour"):
        scenario_from_dict(raw(colour="blue"))


def test_missing_field_named():
    data = raw()
    del data["object"]["mass"]
    with pytest.raises(ScenarioError, match="object.mass"):
        scenario_from_dict(data)


@pytest.mark.parametrize(
    "patch, fragment",
    [
        ({"schema_version": 2}, "schema_version"),
        ({"simulation__x0": 0.2}, "initial x"),
        ({"simulation__t_end": 0.001}, "t_end"),
        ({"simulation__dt": 0.01}, "dt"),
        ({"schedule": [{"duration": 1.0, "v_L": 0.9, "v_R": 0.0}]}, "belt_speed_limit"),
        ({"schedule": [{"duration": 1.0, "omega_L": 1.0, "omega_R": 1.0}]}, "pulley_radius"),
        ({"schedule": [{"duration": 1.0, "v_L": 0.1, "v_R": 0.1, "spin": 1}]}, "spin"),
    ],
)
def test_invalid_scenarios(patch, fragment):
    with pytest.raises(ScenarioError, match=fragment):
        scenario_from_dict(raw(**patch))


def test_malformed_yaml():
    with pytest.raises(ScenarioError, match="parse error"):
        loads_scenario("object: [unclosed")


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError, match="nope.yaml"):
        load_scenario(tmp_path / "nope.yaml")


def test_angular_speed_input():
    sc = scenario_from_dict(
        raw(
            gripper__pulley_radius=0.00637,
            schedule=[{"duration": 0.01, "omega_L": 60.0, "omega_R": -60.0}],
        )
    )
    seg = sc.schedule.segments[0]
    assert (seg.v_L, seg.v_R) == pytest.approx((0.3822, -0.3822))


@pytest.mark.parametrize("name", ["minimal"] + bundled_names())
def test_round_trip(name):
    sc = loads_scenario(MINIMAL) if name == "minimal" else bundled_scenario(name)
    again = loads_scenario(dump_scenario(sc))
    assert again == sc
    assert loads_scenario(dump_scenario(again)) == sc


def test_bundled_set():
    assert bundled_names() == ["cube_reposition", "cylinder_reorient", "sphere_reorient", "vase_reposition"]
    with pytest.raises(ScenarioError, match="no bundled scenario"):
        bundled_path("teapot")
    masses = {n: bundled_scenario(n).object.mass for n in bundled_names()}
    assert masses == {
        "cube_reposition": 0.00866,
        "cylinder_reorient": 0.03174,
        "sphere_reorient": 0.04215,
        "vase_reposition": 0.13204,
    }


# --- CSV export --------------------------------------------------------------


def test_header_golden():
    assert HEADER == "t,x,v,alpha,omega,S_L,S_R,F_N_L,F_N_R,F_s_L,F_s_R,outcome"


def test_empty_export(tmp_path):
    path = export_trajectory(Trajectory.empty(), tmp_path / "e.csv")
    assert path.read_text() == HEADER + "\n"
    assert len(read_trajectory(path)) == 0


def test_ten_steps_ten_rows(tmp_path):
    sc = loads_scenario(MINIMAL)
    traj = sc.simulate()
    assert len(traj) == 100
    short = sc.with_schedule(BeltSchedule([(10e-4, 0.05, 0.05)]))
    out = export_trajectory(short.simulate(), tmp_path / "t.csv")
    lines = out.read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 11
    assert all(line.endswith(",completed") for line in lines[1:])


def test_export_is_byte_identical_and_round_trips(tmp_path, sphere_scenario):
    traj = sphere_scenario.with_schedule(BeltSchedule([(0.05, 0.1, -0.05)])).simulate()
    a = export_trajectory(traj, tmp_path / "a.csv").read_bytes()
    b = export_trajectory(traj, tmp_path / "b.csv").read_bytes()
    assert a == b
    back = read_trajectory(tmp_path / "a.csv")
    assert back.equals(traj)
    assert format_trajectory(back).encode() == a


def test_export_rejects_unordered(tmp_path, sphere_run):
    bad = sphere_run.decimate(1000)
    bad.columns = dict(bad.columns, t=bad["t"][::-1].copy())
    with pytest.raises(ValueError, match="time-ascending"):
        export_trajectory(bad, tmp_path / "x.csv")


def test_export_io_error_names_path(tmp_path, sphere_run):
    target = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        export_trajectory(sphere_run.decimate(1000), target)


# --- trials ------------------------------------------------------------------


X_HOLD = 0.030


def hold_scenario(F_N=0.10, t_end=2.0):
    """Cube held still at 30 mm with a chosen per-side normal force there."""
    sc = bundled_scenario("cube_reposition")
    gap = gap_for_normal_force(sc.object, sc.gripper, F_N, X_HOLD)
    data = yaml.safe_load(dump_scenario(sc))
    data["gripper"]["gap"] = gap
    data["schedule"] = []
    data["simulation"].update(x0=X_HOLD, t_end=t_end)
    return scenario_from_dict(data)


def test_rng_streams_independent_of_order():
    a = trial_rng(7, 3).uniform(size=3)
    trial_rng(7, 0).uniform(size=100)
    assert np.array_equal(a, trial_rng(7, 3).uniform(size=3))
    assert not np.array_equal(a, trial_rng(7, 4).uniform(size=3))


def test_perturbation_invariants():
    with pytest.raises(ValueError):
        PerturbationModel(mu_jitter=-0.1)
    with pytest.raises(ValueError):
        PerturbationModel(seed=-1)
    with pytest.raises(ValueError):
        SuccessSpec()
    sc = hold_scenario()
    p = perturb(sc, PerturbationModel(mu_jitter=0.1, x0_jitter=0.002, seed=3), 5)
    assert abs(p.params.mu_bo - 0.5) <= 0.1
    assert abs(p.initial.x - X_HOLD) <= 0.002
    assert p.object.radius == sc.object.radius


@pytest.mark.parametrize("name, target", [("cube_reposition", "dx"), ("sphere_reorient", "alpha")])
def test_zero_perturbation_all_succeed(name, target):
    sc = bundled_scenario(name)
    traj = sc.simulate(record_every=10**9)
    if target == "dx":
        success = SuccessSpec(target_dx=float(traj["x"][-1] - sc.initial.x))
    else:
        success = SuccessSpec(target_alpha=float(traj["alpha"][-1]))
    report = run_trials(sc, PerturbationModel(seed=1), 3, success)
    assert report.successes == report.n == 3
    assert report.outcomes == (SUCCESS,) * 3


def test_low_friction_trials_drop():
    sc = hold_scenario(F_N=0.10)
    half_weight = required_normal_force(sc.object.mass, 1.0)
    # stiffness rises towards the lowest knot, so a slipping object grips harder as it falls;
    # below mu_drop the grip fails even there, above mu_hold it holds from the start
    profile = sc.gripper.stiffness_profile
    lo = sc.gripper.region[0]
    mu_drop = half_weight / (0.10 * profile.k[0][0] / stiffness_at(profile, X_HOLD))
    mu_hold = half_weight / 0.10
    assert mu_hold == pytest.approx(0.425, abs=1e-3)
    assert lo == 0.025 and mu_drop < mu_hold
    report = run_trials(sc, PerturbationModel(mu_jitter=0.4, seed=5), 24, SuccessSpec(target_dx=0.0))
    for t in report.trials:
        if t.mu < mu_drop:
            assert t.outcome == DROPPED
        elif t.mu > mu_hold + 0.03:
            assert t.outcome == SUCCESS
    assert 0 < report.count(DROPPED) < report.n
    assert report.successes + report.count(DROPPED) + report.count(OFF_TARGET) == report.n


def test_trials_reproducible_and_parallel():
    sc = hold_scenario(t_end=0.3)
    model = PerturbationModel(mu_jitter=0.45, x0_jitter=0.003, seed=2**63 + 11)
    success = SuccessSpec(target_dx=0.0, tol_x=0.002)
    a = run_trials(sc, model, 12, success)
    b = run_trials(sc, model, 12, success)
    c = run_trials(sc, model, 12, success, workers=2)
    assert a == b == c
    assert a.summary() == c.summary()
    assert a.seed == 2**63 + 11
    assert a != run_trials(sc, PerturbationModel(0.45, 0.003, seed=12), 12, success)


def test_trial_errors_are_recorded():
    # radius jitter wide enough to give impossible radii or bites past the characterized depth
    sc = hold_scenario(t_end=0.05)
    report = run_trials(sc, PerturbationModel(r_jitter=0.02, seed=0), 12, SuccessSpec(target_dx=0.0))
    errors = [t for t in report.trials if t.outcome == ERROR]
    assert errors and all("compression depth" in t.reason or "r > 0" in t.reason for t in errors)
    assert all(t.final_x is None for t in errors)
    assert report.successes + len(errors) + report.count(OFF_TARGET) + report.count(DROPPED) == 12


def test_trials_reject_n():
    with pytest.raises(ValueError):
        run_trials(hold_scenario(), PerturbationModel(), 0, SuccessSpec(target_dx=0.0))


# --- CLI ---------------------------------------------------------------------


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_payload(capsys):
    code, out, _ = run_cli(capsys, "payload", "--mu", "0.5", "--torque-kgcm", "3.4", "--lc-cm", "5.965")
    assert code == 0 and out.strip() == "0.570 kg"
    code, out, _ = run_cli(capsys, "payload", "--mu", "0.5", "--torque-kgcm", "3.4", "--lc-cm", "5.965", "--csv")
    header, value = out.split()
    assert header == "G_max_kg" and float(value) == pytest.approx(0.570, abs=5e-4)


def test_cli_plan(capsys):
    sphere = str(bundled_path("sphere_reorient"))
    code, out, _ = run_cli(capsys, "plan", "reorient", "--alpha", "0", "--speed", "0.1", "--scenario", sphere)
    assert code == 0 and out.strip() == "empty schedule"
    code, out, _ = run_cli(capsys, "plan", "reorient", "--alpha", "360", "--speed", "0.0275", "--scenario", sphere, "--csv")
    rows = out.split()
    assert rows[0] == "duration,v_L,v_R"
    d, vl, vr = map(float, rows[1].split(","))
    assert d == pytest.approx(2 * math.pi) and (vl, vr) == (-0.0275, 0.0275)
    code, out, _ = run_cli(capsys, "plan", "reposition", "--dx", "0.02", "--speed", "0.05", "--scenario", sphere)
    assert code == 0 and out.startswith("segment 0: duration=0.4 s")


def test_cli_infeasible_plan(capsys, tmp_path):
    sc = hold_scenario(F_N=0.05)
    path = tmp_path / "weak.yaml"
    path.write_text(dump_scenario(sc))
    code, out, err = run_cli(capsys, "plan", "reposition", "--dx", "0.001", "--speed", "0.01", "--scenario", str(path))
    assert code == 1 and out == ""
    assert err.startswith("error: InfeasibleGrip: infeasible grip") and err.count("\n") == 1


def test_cli_error_line(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text(MINIMAL.replace("mass: 0.04215", "mass: 0.04215, colour: red"))
    code, out, err = run_cli(capsys, "simulate", "--scenario", str(bad))
    assert code == 1
    assert err == "error: ScenarioError: unknown field 'colour' in section 'object'\n"


def test_cli_unknown_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["payload", "--mu", "0.5", "--bogus"])
    assert exc.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_cli_simulate_and_phases(capsys, tmp_path):
    out_csv = tmp_path / "sphere.csv"
    code, out, _ = run_cli(
        capsys, "simulate", "--scenario", str(bundled_path("sphere_reorient")), "--out", str(out_csv)
    )
    assert code == 0 and out.startswith("outcome=completed")
    assert out_csv.read_text().startswith(HEADER + "\n")
    code, out, _ = run_cli(capsys, "phases", "--traj", str(out_csv), "--csv")
    names, values = out.split()
    assert names == "contact_lift,orient_start,descent_start,stable_placement"
    ts = [float(v) for v in values.split(",")]
    assert ts == sorted(ts) and len(set(ts)) == 4


def test_cli_simulate_csv_and_echo(capsys, tmp_path):
    path = tmp_path / "m.yaml"
    path.write_text(MINIMAL)
    code, out, _ = run_cli(capsys, "simulate", "--scenario", str(path), "--csv", "--decimate", "10")
    lines = out.splitlines()
    assert lines[0] == HEADER and len(lines) == 11
    code, out, _ = run_cli(capsys, "simulate", "--scenario", str(path), "--echo")
    assert "schema_version: 1" in out and "outcome=completed" in out


def test_cli_trials_deterministic(capsys, tmp_path):
    path = tmp_path / "hold.yaml"
    path.write_text(dump_scenario(hold_scenario(t_end=0.2)))
    argv = ("trials", "--scenario", str(path), "--n", "20", "--seed", "7", "--mu-jitter", "0.45",
            "--target-dx", "0", "--tol", "0.005")
    first = run_cli(capsys, *argv)
    second = run_cli(capsys, *argv)
    assert first == second
    assert first[0] == 0 and first[1].startswith("n=20 successes=")
    code, out, _ = run_cli(capsys, *argv, "--csv")
    assert out.splitlines()[0] == "trial,outcome,final_x,final_alpha,mu"
    assert len(out.splitlines()) == 21


def test_cli_trials_alpha_target(capsys):
    argv = ("trials", "--scenario", str(bundled_path("cylinder_reorient")), "--n", "2", "--seed", "1",
            "--target-alpha", "180", "--tol", "5")
    code, out, _ = run_cli(capsys, *argv)
    assert code == 0 and out.startswith("n=2 successes=2 ")
