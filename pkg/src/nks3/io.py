"""Deterministic CSV and JSON serialization for grids and reports.

CSV layouts are row-major in v then u (the v index varies slowest), with
17-significant-digit decimals so that write -> read -> write round-trips to
identical bytes.  Readers accept any row order: rows carry their own (u, v)
coordinates and are re-binned onto the reconstructed axes.
"""

from __future__ import annotations

import json

import numpy as np

from .hsystem import h_surface_grid
from .surface import immersion_grid

__all__ = [
    "IMMERSION_HEADER",
    "EPSILON_HEADER",
    "write_immersion_csv",
    "read_immersion_csv",
    "write_epsilon_csv",
    "read_epsilon_csv",
    "dump_report",
    "write_report",
]

IMMERSION_HEADER = "u,v,p0,p1,p2,p3,q0,q1,q2,q3"
EPSILON_HEADER = "u,v,x,y,z"

_FMT = "%.17g"
_JITTER = 1e-9


def _write_rows(path, header, u_vals, v_vals, blocks):
    """Write one CSV with v-major rows: for each v, all u in order."""
    nu, nv = len(u_vals), len(v_vals)
    width = 2 + sum(b.shape[-1] for b in blocks)
    rows = np.empty((nv, nu, width))
    rows[..., 0] = u_vals[None, :]
    rows[..., 1] = v_vals[:, None]
    at = 2
    for b in blocks:
        w = b.shape[-1]
        # blocks are indexed [u, v, component]; rows are [v, u, column]
        rows[..., at : at + w] = np.swapaxes(b, 0, 1)
        at += w
    np.savetxt(
        path, rows.reshape(nv * nu, width), fmt=_FMT, delimiter=",",
        header=header, comments="",
    )


def write_immersion_csv(path, grid):
    _write_rows(path, IMMERSION_HEADER, grid.u_vals, grid.v_vals, [grid.p, grid.q])


def write_epsilon_csv(path, hs):
    _write_rows(path, EPSILON_HEADER, hs.u_vals, hs.v_vals, [hs.eps])


def _recover_axis(raw, label):
    """Sorted distinct coordinate values; rejects irregular spacing."""
    vals = np.unique(raw)
    if len(vals) < 5:
        raise ValueError(f"{label} axis has only {len(vals)} distinct values")
    steps = np.diff(vals)
    step = float(np.median(steps))
    if step <= 0 or np.abs(steps - step).max() > _JITTER:
        raise ValueError(
            f"{label} axis spacing is irregular "
            f"(max jitter {np.abs(steps - step).max():.3e} > {_JITTER:.0e})"
        )
    return vals, step


def _read_rows(path, header, ncols):
    with open(path) as fh:
        first = fh.readline().strip()
        if first != header:
            raise ValueError(
                f"unexpected CSV header {first!r}, expected {header!r}"
            )
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.ndim != 2 or data.shape[1] != ncols:
        raise ValueError(f"expected {ncols} columns, got shape {data.shape}")
    u_vals, du = _recover_axis(data[:, 0], "u")
    v_vals, dv = _recover_axis(data[:, 1], "v")
    nu, nv = len(u_vals), len(v_vals)
    if data.shape[0] != nu * nv:
        raise ValueError(
            f"row count {data.shape[0]} does not fill a {nu} x {nv} grid"
        )
    i = np.searchsorted(u_vals, data[:, 0])
    j = np.searchsorted(v_vals, data[:, 1])
    payload = np.full((nu, nv, ncols - 2), np.nan)
    payload[i, j] = data[:, 2:]
    if not np.isfinite(payload).all():
        raise ValueError("grid has missing or duplicated (u, v) cells")
    return float(u_vals[0]), float(v_vals[0]), du, dv, payload


def read_immersion_csv(path):
    u0, v0, du, dv, payload = _read_rows(path, IMMERSION_HEADER, 10)
    return immersion_grid(u0, v0, du, dv, payload[..., :4], payload[..., 4:])


def read_epsilon_csv(path):
    u0, v0, du, dv, payload = _read_rows(path, EPSILON_HEADER, 5)
    return h_surface_grid(u0, v0, du, dv, payload)


def _to_plain(obj):
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def dump_report(report):
    """Canonical JSON text for a report dict (sorted keys, trailing newline)."""
    return json.dumps(_to_plain(report), sort_keys=True, indent=2) + "\n"


def write_report(path, report):
    with open(path, "w") as fh:
        fh.write(dump_report(report))
