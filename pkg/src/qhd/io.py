"""Snapshot files, CSV outputs and status files.

Snapshot layout (little-endian)::

    magic        8 bytes   b"QHDSNAP\\0"
    version      uint32    1
    dim          uint32
    N            uint32
    L            float64
    time         float64
    field_count  uint32
    names        field_count x 16 bytes, ASCII, NUL padded
    payload      field_count x N**dim float64, row-major (C order)

Fields are written in the order ``rho, u0[, u1[, u2]], theta``.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .fields import State, make_grid

MAGIC = b"QHDSNAP\x00"
VERSION = 1
NAME_BYTES = 16
_HEADER = struct.Struct("<8sIIIddI")

FAMILY_COLUMNS = ("hbar", "sup_h1_err", "sup_h2_err", "status")


def state_fields(state: State) -> dict[str, np.ndarray]:
    out = {"rho": state.rho}
    for i in range(state.grid.dim):
        out[f"u{i}"] = state.u[i]
    out["theta"] = state.theta
    return out


def write_snapshot(path, state: State) -> None:
    g = state.grid
    fields = state_fields(state)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, g.dim, g.N, g.L, state.time, len(fields)))
        for name in fields:
            fh.write(name.encode("ascii").ljust(NAME_BYTES, b"\x00"))
        for arr in fields.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot(path) -> State:
    data = Path(path).read_bytes()
    magic, version, dim, N, L, time, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a snapshot file")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    off = _HEADER.size
    names = []
    for _ in range(count):
        names.append(data[off:off + NAME_BYTES].rstrip(b"\x00").decode("ascii"))
        off += NAME_BYTES
    grid = make_grid(dim, L, N)
    size = N**dim
    arrays = {}
    for name in names:
        arrays[name] = np.frombuffer(data, dtype="<f8", count=size, offset=off).reshape(grid.shape).copy()
        off += 8 * size
    u = np.stack([arrays[f"u{i}"] for i in range(dim)])
    return State(grid, arrays["rho"], u, arrays["theta"], time)


def write_trajectory(outdir, traj) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, s in enumerate(traj.states):
        p = outdir / f"snap_{i:05d}.qhd"
        write_snapshot(p, s)
        paths.append(p)
    return paths


def read_trajectory(outdir) -> list[State]:
    return [read_snapshot(p) for p in sorted(Path(outdir).glob("snap_*.qhd"))]


def write_status(path, status: str, message: str = "", **extra) -> None:
    payload = {"status": status, "message": message, **extra}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_family_csv(path, rows) -> None:
    """``rows``: iterable of (hbar, sup_h1_err, sup_h2_err, status)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FAMILY_COLUMNS)
        for hbar, e1, e2, status in rows:
            w.writerow([repr(float(hbar)), repr(float(e1)), repr(float(e2)), status])


def write_profiles_csv(path, states) -> None:
    """Long-format field samples for plotting: one row per (snapshot, grid point)."""
    states = list(states)
    dim = states[0].grid.dim
    coord_names = ["x", "y", "z"][:dim]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", *coord_names, "rho", *[f"u{i}" for i in range(dim)], "theta"])
        for s in states:
            coords = [c.ravel() for c in s.grid.coords()]
            cols = [s.rho.ravel(), *[s.u[i].ravel() for i in range(dim)], s.theta.ravel()]
            for j in range(s.rho.size):
                w.writerow([repr(float(s.time)), *[repr(float(c[j])) for c in coords], *[repr(float(c[j])) for c in cols]])
