"""Textual wire formats: snapshot JSON/CSV and trajectory CSV."""

from __future__ import annotations

import json

import numpy as np

from .errors import HamiltonianFormatError
from .grids import Grid, GridState
from .trajectories import Ensemble

CSV_POINT_LIMIT = 4096  # snapshots above this size get JSON only


def snapshot_to_json(state: GridState) -> str:
    flat = state.values.reshape(-1)
    return json.dumps(
        {
            "dimension": state.dim,
            "lengths": list(state.grid.lengths),
            "shape": list(state.grid.shape),
            "time": state.t,
            "values": [[float(v.real), float(v.imag)] for v in flat],
        }
    )


def snapshot_from_json(text: str) -> GridState:
    try:
        doc = json.loads(text)
        grid = Grid(tuple(doc["lengths"]), tuple(doc["shape"]))
        pairs = np.asarray(doc["values"], dtype=float)
        values = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(grid.shape)
        return GridState(grid, values, float(doc["time"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise HamiltonianFormatError(f"bad snapshot document: {exc}") from exc


def snapshot_to_csv(state: GridState) -> str:
    header = ",".join(f"q{a}" for a in range(1, state.dim + 1)) + ",re,im"
    meshes = state.grid.meshes()
    coords = [m.reshape(-1) for m in meshes]
    flat = state.values.reshape(-1)
    lines = [header]
    for idx in range(flat.size):
        pos = ",".join(f"{c[idx]:.12g}" for c in coords)
        lines.append(f"{pos},{flat[idx].real:.15g},{flat[idx].imag:.15g}")
    return "\n".join(lines) + "\n"


def trajectory_csv(ensemble: Ensemble) -> str:
    """One row per particle per recorded time.

    The `truncated` flag marks particles whose trajectory hit a node at some
    point of the run (they are frozen from there on).
    """
    header = "t,particle_id,ADD_AXES,truncated"
    axes = ",".join(f"q{a}" for a in range(1, ensemble.dim + 1))
    lines = [header.replace("ADD_AXES", axes)]
    for t, positions in zip(ensemble.times, ensemble.history):
        for pid in range(ensemble.count):
            coords = ",".join(f"{x:.12g}" for x in positions[pid])
            flag = int(bool(ensemble.truncated[pid]))
            lines.append(f"{t:.12g},{pid},{coords},{flag}")
    return "\n".join(lines) + "\n"
