"""CSV artifacts and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from cournot_mfg.errors import UsageError

SERIES = ("price", "production", "mass", "convergence")
FIELDS = ("U", "M", "Q")


def fmt(v) -> str:
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return ""
    return format(float(v), ".17g")


def _write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return path


def export_series(sol, which: str, path) -> Path:
    grid = sol.grid
    if which == "price":
        return _write_rows(path, ["t", "price"], ((fmt(t), fmt(v)) for t, v in zip(sol.P.times, sol.P.values)))
    if which == "production":
        return _write_rows(
            path, ["t", "production"], ((fmt(t), fmt(v)) for t, v in zip(sol.psi.times, sol.psi.values))
        )
    if which == "mass":
        mass = grid.h * sol.M.values[:, : grid.N_L + 1].sum(axis=1)
        return _write_rows(path, ["t", "mass"], ((fmt(t), fmt(v)) for t, v in zip(grid.t, mass)))
    if which == "convergence":
        header = ["n", "residual", "weighted_an", "exploitability", "J_value", "terminal_mass"]
        rows = (
            (str(d.n), fmt(d.residual), fmt(d.weighted_an), fmt(d.exploitability), fmt(d.J_value), fmt(d.terminal_mass))
            for d in sol.history
        )
        return _write_rows(path, header, rows)
    raise UsageError(f"unknown series {which!r}; choose from {SERIES}")


def default_times(n_rows: int, count: int = 5) -> list[int]:
    return sorted({int(round(k)) for k in np.linspace(0, n_rows - 1, count)})


def export_field(sol, which: str, times, path) -> Path:
    """Write snapshot columns of U, M or Q; x runs over 0..L (ghost excluded)."""
    if which not in FIELDS:
        raise UsageError(f"unknown field {which!r}; choose from {FIELDS}")
    f = getattr(sol, which)
    vals = f.values
    if which == "M":
        # the scheme may leave round-off negatives; exported densities are clipped
        vals = np.maximum(vals, 0.0)
    n_rows = vals.shape[0]
    times = list(times)
    bad = [tau for tau in times if not 0 <= tau < n_rows]
    if bad:
        raise UsageError(f"time indices {bad} out of range 0..{n_rows - 1} for field {which}")
    grid = sol.grid
    header = ["x"] + [f"t={fmt(grid.t[tau])}" for tau in times]
    n = grid.N_L + 1
    rows = ((fmt(grid.x[i]), *(fmt(vals[tau, i]) for tau in times)) for i in range(n))
    return _write_rows(path, header, rows)


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, config, sol, wall_clock: float, artifacts) -> dict:
    out_dir = Path(path).parent
    manifest = {
        "config": config.to_dict(),
        "converged": bool(sol.converged),
        "status": "converged" if sol.converged else "max_iters_reached",
        "iterations": sol.iterations,
        "final_residual": sol.final_residual,
        "epsilon": config.solver.epsilon,
        "max_iters": config.solver.max_iters,
        "wall_clock_seconds": wall_clock,
        "artifacts": [
            {"path": str(Path(a).relative_to(out_dir)), "sha256": sha256(a)} for a in artifacts
        ],
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def verify_manifest(path) -> bool:
    manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    base = Path(path).parent
    return all(sha256(base / a["path"]) == a["sha256"] for a in manifest["artifacts"])
