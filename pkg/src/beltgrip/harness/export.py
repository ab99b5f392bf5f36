"""Trajectory CSV export and import."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from beltgrip.dynamics import COLUMNS, Trajectory

HEADER = "t,x,v,alpha,omega,S_L,S_R,F_N_L,F_N_R,F_s_L,F_s_R,outcome"


def format_trajectory(traj: Trajectory) -> str:
    """CSV text; floats use Python's shortest round-trip repr.

    Every row carries the run's final outcome so a single row is self-describing.
    """
    cols = [traj.columns[c].tolist() for c in COLUMNS]
    lines = [HEADER]
    for row in zip(*cols):
        lines.append(",".join(repr(float(v)) for v in row) + "," + traj.outcome)
    return "\n".join(lines) + "\n"


def export_trajectory(traj: Trajectory, path: str | Path) -> Path:
    path = Path(path)
    t = traj.columns["t"]
    if len(t) > 1 and not np.all(np.diff(t) > 0):
        raise ValueError("trajectory rows must be strictly time-ascending")
    try:
        with open(path, "w", newline="") as fh:
            fh.write(format_trajectory(traj))
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write trajectory to {path}: {exc.strerror}") from exc
    return path


def read_trajectory(path: str | Path) -> Trajectory:
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read trajectory {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or ",".join(header) != HEADER:
            raise ValueError(f"{path}: header does not match {HEADER!r}")
        rows = list(reader)
    outcome = rows[-1][-1] if rows else "completed"
    if rows:
        data = np.array([[float(v) for v in r[:-1]] for r in rows], dtype=float)
        cols = {c: data[:, i].copy() for i, c in enumerate(COLUMNS)}
    else:
        cols = {c: np.zeros(0) for c in COLUMNS}
    return Trajectory(cols, outcome)
